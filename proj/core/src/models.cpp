#include "proximix/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>

#include <nlohmann/json.hpp>

#include "proximix/errors.hpp"
#include "proximix/rng.hpp"

namespace proximix {

namespace {

using json = nlohmann::ordered_json;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// numerically stable BCE of a logit against a (possibly soft) target
double bce_from_logit(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

void validate_spec(const TrainSpec& spec, int feature_dim) {
    if (spec.max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
    if (spec.tolerance < 0.0) throw ConfigError("tolerance must be >= 0");
    switch (spec.family) {
        case ModelFamily::DecisionTree:
            if (spec.max_depth < 0) throw ConfigError("max_depth must be >= 0");
            break;
        case ModelFamily::Mlp:
            if (spec.hidden_layers.empty())
                throw ConfigError("mlp needs at least one hidden layer");
            for (int h : spec.hidden_layers)
                if (h < 1) throw ConfigError("hidden layer width must be >= 1");
            if (spec.batch_size < 1) throw ConfigError("batch_size must be >= 1");
            break;
        case ModelFamily::LogReg:
            break;
    }
    if (feature_dim < 1) throw ConfigError("training data has no features");
}

struct MlpLayout {
    std::vector<int> layers;
    std::vector<std::size_t> w_offset;
    std::vector<std::size_t> b_offset;
    std::size_t total = 0;

    explicit MlpLayout(const std::vector<int>& shape) : layers(shape) {
        if (shape.size() < 2) throw ConfigError("mlp shape needs input and output layers");
        std::size_t off = 0;
        for (std::size_t l = 1; l < shape.size(); ++l) {
            if (shape[l] < 1 || shape[l - 1] < 1)
                throw ConfigError("mlp layer widths must be >= 1");
            w_offset.push_back(off);
            off += static_cast<std::size_t>(shape[l]) * static_cast<std::size_t>(shape[l - 1]);
            b_offset.push_back(off);
            off += static_cast<std::size_t>(shape[l]);
        }
        total = off;
    }

    int depth() const { return static_cast<int>(layers.size()) - 1; }

    Eigen::Map<const RowMajorMatrix> W(const Eigen::VectorXd& theta, int l) const {
        return {theta.data() + w_offset[static_cast<std::size_t>(l - 1)],
                layers[static_cast<std::size_t>(l)], layers[static_cast<std::size_t>(l) - 1]};
    }
    Eigen::Map<const Eigen::VectorXd> b(const Eigen::VectorXd& theta, int l) const {
        return {theta.data() + b_offset[static_cast<std::size_t>(l - 1)],
                layers[static_cast<std::size_t>(l)]};
    }
    Eigen::Map<RowMajorMatrix> W(Eigen::VectorXd& theta, int l) const {
        return {theta.data() + w_offset[static_cast<std::size_t>(l - 1)],
                layers[static_cast<std::size_t>(l)], layers[static_cast<std::size_t>(l) - 1]};
    }
    Eigen::Map<Eigen::VectorXd> b(Eigen::VectorXd& theta, int l) const {
        return {theta.data() + b_offset[static_cast<std::size_t>(l - 1)],
                layers[static_cast<std::size_t>(l)]};
    }
};

// forward pass keeping logits of the output layer; hidden activations are
// stored only when a backward pass will follow
Eigen::VectorXd mlp_logits(const MlpLayout& layout, const Eigen::VectorXd& theta,
                           const Eigen::MatrixXd& X,
                           std::vector<Eigen::MatrixXd>* activations = nullptr,
                           std::vector<Eigen::MatrixXd>* preacts = nullptr) {
    Eigen::MatrixXd a = X;
    if (activations) activations->push_back(a);
    const int depth = layout.depth();
    for (int l = 1; l <= depth; ++l) {
        Eigen::MatrixXd z = a * layout.W(theta, l).transpose();
        z.rowwise() += layout.b(theta, l).transpose();
        if (l < depth) {
            if (preacts) preacts->push_back(z);
            a = z.cwiseMax(0.0);
            if (activations) activations->push_back(a);
        } else {
            return z.col(0);
        }
    }
    throw ConfigError("mlp shape needs input and output layers");
}

double mean_bce(const Eigen::VectorXd& logits, const Eigen::VectorXd& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i)
        total += bce_from_logit(logits(i), y(i));
    return total / static_cast<double>(logits.size());
}

Eigen::VectorXd mlp_grad_impl(const MlpLayout& layout, const Eigen::VectorXd& theta,
                              const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    std::vector<Eigen::MatrixXd> acts;
    std::vector<Eigen::MatrixXd> preacts;
    Eigen::VectorXd logits = mlp_logits(layout, theta, X, &acts, &preacts);

    const auto n = static_cast<double>(X.rows());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.total));
    Eigen::MatrixXd delta(X.rows(), 1);
    for (Eigen::Index i = 0; i < logits.size(); ++i)
        delta(i, 0) = (sigmoid(logits(i)) - y(i)) / n;

    const int depth = layout.depth();
    for (int l = depth; l >= 1; --l) {
        layout.W(grad, l) = delta.transpose() * acts[static_cast<std::size_t>(l - 1)];
        layout.b(grad, l) = delta.colwise().sum().transpose();
        if (l > 1) {
            Eigen::MatrixXd back = delta * layout.W(theta, l);
            const Eigen::MatrixXd& z = preacts[static_cast<std::size_t>(l - 2)];
            delta = back.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
        }
    }
    return grad;
}

TrainedModel train_logreg(const EncodedDataset& data, const TrainSpec& spec,
                          bool single_class) {
    const auto dim = static_cast<Eigen::Index>(data.dim());
    const double lr = spec.learning_rate > 0.0 ? spec.learning_rate : 0.1;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim + 1);
    double prev_loss = logreg_loss(theta, data.features, data.labels);
    for (int it = 0; it < spec.max_iterations; ++it) {
        theta -= lr * logreg_grad(theta, data.features, data.labels);
        double loss = logreg_loss(theta, data.features, data.labels);
        if (prev_loss - loss < spec.tolerance) break;
        prev_loss = loss;
    }
    LogRegParams params;
    params.weights = theta.head(dim);
    params.bias = theta(dim);
    return {ModelFamily::LogReg, static_cast<int>(dim), single_class, std::move(params)};
}

TrainedModel train_mlp(const EncodedDataset& data, const TrainSpec& spec,
                       bool single_class) {
    const int dim = static_cast<int>(data.dim());
    const double lr = spec.learning_rate > 0.0 ? spec.learning_rate : 1e-3;

    std::vector<int> shape;
    shape.push_back(dim);
    shape.insert(shape.end(), spec.hidden_layers.begin(), spec.hidden_layers.end());
    shape.push_back(1);
    MlpLayout layout(shape);

    Rng rng(seed_combine(spec.seed, seed_mix(0x6d6c70ULL)));  // "mlp"
    Eigen::VectorXd theta(static_cast<Eigen::Index>(layout.total));
    for (int l = 1; l <= layout.depth(); ++l) {
        double scale = std::sqrt(2.0 / static_cast<double>(shape[static_cast<std::size_t>(l) - 1]));
        auto W = layout.W(theta, l);
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = rng.normal() * scale;
        layout.b(theta, l).setZero();
    }

    const auto n = static_cast<Eigen::Index>(data.size());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    double prev_loss = mean_bce(mlp_logits(layout, theta, data.features), data.labels);

    for (int epoch = 0; epoch < spec.max_iterations; ++epoch) {
        rng.shuffle(order);
        for (Eigen::Index start = 0; start < n; start += spec.batch_size) {
            const Eigen::Index count = std::min<Eigen::Index>(spec.batch_size, n - start);
            Eigen::MatrixXd bx(count, dim);
            Eigen::VectorXd by(count);
            for (Eigen::Index i = 0; i < count; ++i) {
                bx.row(i) = data.features.row(order[static_cast<std::size_t>(start + i)]);
                by(i) = data.labels(order[static_cast<std::size_t>(start + i)]);
            }
            theta -= lr * mlp_grad_impl(layout, theta, bx, by);
        }
        double loss = mean_bce(mlp_logits(layout, theta, data.features), data.labels);
        if (prev_loss - loss < spec.tolerance) break;
        prev_loss = loss;
    }

    MlpParams params;
    params.layers = shape;
    params.theta = std::move(theta);
    return {ModelFamily::Mlp, dim, single_class, std::move(params)};
}

json params_to_json(const TrainedModel& model) {
    json p;
    switch (model.family()) {
        case ModelFamily::LogReg: {
            const auto& lr = model.logreg();
            p["weights"] = std::vector<double>(lr.weights.data(),
                                               lr.weights.data() + lr.weights.size());
            p["bias"] = lr.bias;
            break;
        }
        case ModelFamily::DecisionTree: {
            json nodes = json::array();
            for (const auto& node : model.tree().nodes) {
                json n;
                n["leaf"] = node.leaf;
                n["feature"] = node.feature;
                n["threshold"] = node.threshold;
                n["left"] = node.left;
                n["right"] = node.right;
                n["fraction"] = node.fraction;
                nodes.push_back(std::move(n));
            }
            p["nodes"] = std::move(nodes);
            break;
        }
        case ModelFamily::Mlp: {
            const auto& mlp = model.mlp();
            p["layers"] = mlp.layers;
            p["theta"] = std::vector<double>(mlp.theta.data(),
                                             mlp.theta.data() + mlp.theta.size());
            break;
        }
    }
    return p;
}

std::variant<LogRegParams, TreeParams, MlpParams> params_from_json(ModelFamily family,
                                                                   const json& p) {
    switch (family) {
        case ModelFamily::LogReg: {
            LogRegParams lr;
            auto w = p.at("weights").get<std::vector<double>>();
            lr.weights = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                                           static_cast<Eigen::Index>(w.size()));
            lr.bias = p.at("bias").get<double>();
            return lr;
        }
        case ModelFamily::DecisionTree: {
            TreeParams tree;
            for (const auto& n : p.at("nodes")) {
                TreeNode node;
                node.leaf = n.at("leaf").get<bool>();
                node.feature = n.at("feature").get<int>();
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
                node.fraction = n.at("fraction").get<double>();
                tree.nodes.push_back(node);
            }
            return tree;
        }
        case ModelFamily::Mlp: {
            MlpParams mlp;
            mlp.layers = p.at("layers").get<std::vector<int>>();
            auto t = p.at("theta").get<std::vector<double>>();
            mlp.theta = Eigen::Map<const Eigen::VectorXd>(t.data(),
                                                          static_cast<Eigen::Index>(t.size()));
            MlpLayout layout(mlp.layers);
            if (layout.total != static_cast<std::size_t>(mlp.theta.size()))
                throw ConfigError("mlp theta size does not match its layer shape");
            return mlp;
        }
    }
    throw ConfigError("unknown model family");
}

}  // namespace

std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::LogReg: return "logreg";
        case ModelFamily::DecisionTree: return "tree";
        case ModelFamily::Mlp: return "mlp";
    }
    throw ConfigError("unknown model family");
}

ModelFamily family_by_name(const std::string& name) {
    if (name == "logreg") return ModelFamily::LogReg;
    if (name == "tree") return ModelFamily::DecisionTree;
    if (name == "mlp") return ModelFamily::Mlp;
    throw ConfigError("unknown model family: " + name);
}

double logreg_loss(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y) {
    if (theta.size() != X.cols() + 1)
        throw DimensionMismatchError("logreg theta must have one entry per feature plus bias");
    if (X.rows() != y.size())
        throw DimensionMismatchError("feature rows and targets differ in length");
    Eigen::VectorXd z = X * theta.head(X.cols());
    z.array() += theta(X.cols());
    return mean_bce(z, y);
}

Eigen::VectorXd logreg_grad(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y) {
    if (theta.size() != X.cols() + 1)
        throw DimensionMismatchError("logreg theta must have one entry per feature plus bias");
    if (X.rows() != y.size())
        throw DimensionMismatchError("feature rows and targets differ in length");
    Eigen::VectorXd z = X * theta.head(X.cols());
    z.array() += theta(X.cols());
    Eigen::VectorXd residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) residual(i) = sigmoid(z(i)) - y(i);
    residual /= static_cast<double>(X.rows());
    Eigen::VectorXd grad(theta.size());
    grad.head(X.cols()) = X.transpose() * residual;
    grad(X.cols()) = residual.sum();
    return grad;
}

std::size_t mlp_param_count(const std::vector<int>& layers) {
    return MlpLayout(layers).total;
}

double mlp_loss(const std::vector<int>& layers, const Eigen::VectorXd& theta,
                const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    MlpLayout layout(layers);
    if (layout.total != static_cast<std::size_t>(theta.size()))
        throw DimensionMismatchError("mlp theta size does not match its layer shape");
    if (X.rows() != y.size())
        throw DimensionMismatchError("feature rows and targets differ in length");
    return mean_bce(mlp_logits(layout, theta, X), y);
}

Eigen::VectorXd mlp_grad(const std::vector<int>& layers, const Eigen::VectorXd& theta,
                         const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    MlpLayout layout(layers);
    if (layout.total != static_cast<std::size_t>(theta.size()))
        throw DimensionMismatchError("mlp theta size does not match its layer shape");
    if (X.rows() != y.size())
        throw DimensionMismatchError("feature rows and targets differ in length");
    return mlp_grad_impl(layout, theta, X, y);
}

TrainedModel train(const EncodedDataset& data, const TrainSpec& spec) {
    if (data.size() == 0) throw EmptyInputError("cannot train on an empty dataset");
    validate_spec(spec, static_cast<int>(data.dim()));

    std::vector<int> hard(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        hard[i] = data.labels(static_cast<Eigen::Index>(i)) >= 0.5 ? 1 : 0;
    const bool single_class =
        std::all_of(hard.begin(), hard.end(), [&](int h) { return h == hard[0]; });

    switch (spec.family) {
        case ModelFamily::LogReg:
            return train_logreg(data, spec, single_class);
        case ModelFamily::DecisionTree: {
            TreeParams params = build_tree(data.features, hard, spec.max_depth);
            return {ModelFamily::DecisionTree, static_cast<int>(data.dim()), single_class,
                    std::move(params)};
        }
        case ModelFamily::Mlp:
            return train_mlp(data, spec, single_class);
    }
    throw ConfigError("unknown model family");
}

double TrainedModel::predict_score(const Eigen::RowVectorXd& x) const {
    if (x.size() != feature_dim_)
        throw DimensionMismatchError("input width does not match the model's feature count");
    switch (family_) {
        case ModelFamily::LogReg: {
            const auto& lr = std::get<LogRegParams>(params_);
            return sigmoid(x.dot(lr.weights) + lr.bias);
        }
        case ModelFamily::DecisionTree: {
            const auto& nodes = std::get<TreeParams>(params_).nodes;
            int at = 0;
            while (!nodes[static_cast<std::size_t>(at)].leaf) {
                const auto& node = nodes[static_cast<std::size_t>(at)];
                at = x(node.feature) <= node.threshold ? node.left : node.right;
            }
            return nodes[static_cast<std::size_t>(at)].fraction;
        }
        case ModelFamily::Mlp: {
            const auto& mlp = std::get<MlpParams>(params_);
            MlpLayout layout(mlp.layers);
            Eigen::VectorXd z = mlp_logits(layout, mlp.theta, x);
            return sigmoid(z(0));
        }
    }
    throw ConfigError("unknown model family");
}

Eigen::VectorXd TrainedModel::predict_scores(const Eigen::MatrixXd& X) const {
    if (X.rows() == 0) return Eigen::VectorXd{};
    if (X.cols() != feature_dim_)
        throw DimensionMismatchError("input width does not match the model's feature count");
    if (family_ == ModelFamily::Mlp) {
        const auto& mlp = std::get<MlpParams>(params_);
        MlpLayout layout(mlp.layers);
        Eigen::VectorXd z = mlp_logits(layout, mlp.theta, X);
        Eigen::VectorXd out(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = sigmoid(z(i));
        return out;
    }
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_score(X.row(i));
    return out;
}

int TrainedModel::predict_label(const Eigen::RowVectorXd& x) const {
    return predict_score(x) >= 0.5 ? 1 : 0;
}

Eigen::VectorXi TrainedModel::predict_labels(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd scores = predict_scores(X);
    Eigen::VectorXi out(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) out(i) = scores(i) >= 0.5 ? 1 : 0;
    return out;
}

std::string TrainedModel::serialize() const {
    json doc;
    doc["family"] = family_name(family_);
    doc["feature_dim"] = feature_dim_;
    doc["single_class"] = single_class_;
    doc["params"] = params_to_json(*this);
    return doc.dump();
}

TrainedModel TrainedModel::deserialize(const std::string& payload) {
    json doc = json::parse(payload);
    ModelFamily family = family_by_name(doc.at("family").get<std::string>());
    int feature_dim = doc.at("feature_dim").get<int>();
    bool single_class = doc.at("single_class").get<bool>();
    return {family, feature_dim, single_class, params_from_json(family, doc.at("params"))};
}

}  // namespace proximix
