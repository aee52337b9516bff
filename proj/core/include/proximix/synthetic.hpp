#pragma once

#include <cstdint>
#include <string>

#include "proximix/dataset.hpp"
#include "proximix/schema.hpp"

namespace proximix {

// Seeded generator for a screening-style table with a controllable label
// bias against the unprivileged group. Mechanics, per row:
//   group  ~ "A" (privileged) or "B", each with probability 1/2
//   skill  ~ Uniform(0,1)                        (latent, not emitted)
//   score1 = clamp01(skill + 0.12 * Normal(0,1))
//   score2 = clamp01(0.6 * skill + 0.4 * Uniform(0,1))
//   dept   ~ uniform over {"X", "Y", "Z"}        (uninformative filler)
//   merit  = skill > 0.5                         (the unbiased outcome)
//   outcome = merit, except a meritorious group-B row is recorded as "no"
//             with probability label_bias
// label_bias = 0 gives identically distributed outcomes in both groups;
// raising it starves group B of recorded positives, the regime a
// proximity-aware mixer is meant to repair.
struct SyntheticSpec {
    int rows = 2000;
    double label_bias = 0.35;  // P(positive recorded as negative | group B)
    std::uint64_t seed = 7;

    void validate() const;
};

struct SyntheticData {
    RawTable table;
    DatasetSchema schema;  // sensitive: group (privileged "A"); label: outcome ("yes")
};

SyntheticData make_biased_dataset(const SyntheticSpec& spec);

// RFC 4180 text form of a table (cells with comma/quote/newline quoted).
std::string csv_text(const RawTable& table);
void write_csv(const RawTable& table, const std::string& path);

}  // namespace proximix
