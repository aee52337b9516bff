#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "proximix/errors.hpp"
#include "proximix/models.hpp"

namespace proximix {

namespace {

double gini(std::size_t pos, std::size_t n) {
    if (n == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(n);
    double q = 1.0 - p;
    return 1.0 - p * p - q * q;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

struct Builder {
    const Eigen::MatrixXd& X;
    const std::vector<int>& y;
    int max_depth;
    std::vector<TreeNode> nodes;

    // Scans every feature ascending and every midpoint between distinct
    // adjacent values ascending, keeping the first strict minimum, so ties
    // resolve to the lowest feature index and then the lowest threshold.
    SplitChoice best_split(const std::vector<int>& rows) const {
        const std::size_t n = rows.size();
        SplitChoice best;
        std::vector<std::pair<double, int>> column(n);
        for (int f = 0; f < X.cols(); ++f) {
            for (std::size_t i = 0; i < n; ++i)
                column[i] = {X(rows[i], f), y[static_cast<std::size_t>(rows[i])]};
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::size_t left_pos = 0;
            std::size_t total_pos = 0;
            for (const auto& [value, label] : column) total_pos += static_cast<std::size_t>(label);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_pos += static_cast<std::size_t>(column[i].second);
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t left_n = i + 1;
                const std::size_t right_n = n - left_n;
                double weighted =
                    (static_cast<double>(left_n) * gini(left_pos, left_n) +
                     static_cast<double>(right_n) * gini(total_pos - left_pos, right_n)) /
                    static_cast<double>(n);
                if (!best.found || weighted < best.weighted_gini) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = 0.5 * (column[i].first + column[i + 1].first);
                    best.weighted_gini = weighted;
                }
            }
        }
        return best;
    }

    int build(const std::vector<int>& rows, int depth) {
        const std::size_t n = rows.size();
        std::size_t pos = 0;
        for (int r : rows) pos += static_cast<std::size_t>(y[static_cast<std::size_t>(r)]);

        const int idx = static_cast<int>(nodes.size());
        TreeNode node;
        node.fraction = static_cast<double>(pos) / static_cast<double>(n);
        nodes.push_back(node);

        if (depth >= max_depth || pos == 0 || pos == n || n < 2) return idx;

        SplitChoice split = best_split(rows);
        if (!split.found || split.weighted_gini >= gini(pos, n)) return idx;

        std::vector<int> left_rows;
        std::vector<int> right_rows;
        for (int r : rows) {
            if (X(r, split.feature) <= split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }

        nodes[static_cast<std::size_t>(idx)].leaf = false;
        nodes[static_cast<std::size_t>(idx)].feature = split.feature;
        nodes[static_cast<std::size_t>(idx)].threshold = split.threshold;
        const int left = build(left_rows, depth + 1);
        nodes[static_cast<std::size_t>(idx)].left = left;
        const int right = build(right_rows, depth + 1);
        nodes[static_cast<std::size_t>(idx)].right = right;
        return idx;
    }
};

}  // namespace

TreeParams build_tree(const Eigen::MatrixXd& X, const std::vector<int>& hard_labels,
                      int max_depth) {
    if (X.rows() == 0) throw EmptyInputError("cannot grow a tree from an empty dataset");
    if (static_cast<std::size_t>(X.rows()) != hard_labels.size())
        throw LengthMismatchError("feature rows and labels differ in length");

    Builder builder{X, hard_labels, max_depth, {}};
    std::vector<int> rows(static_cast<std::size_t>(X.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    builder.build(rows, 0);

    TreeParams params;
    params.nodes = std::move(builder.nodes);
    return params;
}

}  // namespace proximix
