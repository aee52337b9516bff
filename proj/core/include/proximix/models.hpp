#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "proximix/dataset.hpp"

namespace proximix {

enum class ModelFamily { LogReg, DecisionTree, Mlp };

std::string family_name(ModelFamily f);
ModelFamily family_by_name(const std::string& name);

struct TrainSpec {
    ModelFamily family = ModelFamily::LogReg;
    int max_depth = 7;                              // tree
    std::vector<int> hidden_layers = {128, 128, 128};  // mlp
    int max_iterations = 1500;
    double learning_rate = 0.0;  // 0 picks the family default (0.1 / 1e-3)
    int batch_size = 64;         // mlp minibatch
    double tolerance = 1e-6;     // early stop on loss improvement below this
    std::uint64_t seed = 42;
};

struct LogRegParams {
    Eigen::VectorXd weights;
    double bias = 0.0;
};

struct TreeNode {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double fraction = 0.0;  // positive-label fraction of routed training rows
};

struct TreeParams {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct MlpParams {
    std::vector<int> layers;  // input, hidden..., 1
    Eigen::VectorXd theta;    // per layer: W row-major (out x in), then b
};

// Trained binary predictor. Scores are in [0, 1]; the hard label is
// score >= 0.5. Immutable once trained.
class TrainedModel {
public:
    TrainedModel() = default;
    TrainedModel(ModelFamily family, int feature_dim, bool single_class,
                 std::variant<LogRegParams, TreeParams, MlpParams> params)
        : family_(family), feature_dim_(feature_dim), single_class_(single_class),
          params_(std::move(params)) {}

    ModelFamily family() const { return family_; }
    int feature_dim() const { return feature_dim_; }
    // all thresholded training labels were identical
    bool single_class() const { return single_class_; }

    const LogRegParams& logreg() const { return std::get<LogRegParams>(params_); }
    const TreeParams& tree() const { return std::get<TreeParams>(params_); }
    const MlpParams& mlp() const { return std::get<MlpParams>(params_); }

    double predict_score(const Eigen::RowVectorXd& x) const;
    Eigen::VectorXd predict_scores(const Eigen::MatrixXd& X) const;
    int predict_label(const Eigen::RowVectorXd& x) const;
    Eigen::VectorXi predict_labels(const Eigen::MatrixXd& X) const;

    std::string serialize() const;
    static TrainedModel deserialize(const std::string& payload);

private:
    ModelFamily family_ = ModelFamily::LogReg;
    int feature_dim_ = 0;
    bool single_class_ = false;
    std::variant<LogRegParams, TreeParams, MlpParams> params_;
};

// Gradient-descent training for LogReg and the MLP against (possibly soft)
// targets; CART with Gini impurity on thresholded labels for the tree.
// Deterministic given spec.seed.
TrainedModel train(const EncodedDataset& data, const TrainSpec& spec);

// Loss surfaces used by training, exposed so gradients can be checked
// against finite differences. theta packs [weights; bias] for logreg and
// the MlpParams layout for the mlp.
double logreg_loss(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y);
Eigen::VectorXd logreg_grad(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y);

std::size_t mlp_param_count(const std::vector<int>& layers);
double mlp_loss(const std::vector<int>& layers, const Eigen::VectorXd& theta,
                const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
Eigen::VectorXd mlp_grad(const std::vector<int>& layers, const Eigen::VectorXd& theta,
                         const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// internal: CART builder, defined in tree.cpp
TreeParams build_tree(const Eigen::MatrixXd& X, const std::vector<int>& hard_labels,
                      int max_depth);

}  // namespace proximix
