#include "surropt/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "surropt/errors.hpp"
#include "surropt/parallel.hpp"
#include "surropt/rng.hpp"

namespace surropt {

void GbdtHyper::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid gbdt hyperparameter: " + what); };
  if (!(eta > 0.0 && eta <= 1.0)) fail("eta must lie in (0, 1]");
  if (max_depth < 1) fail("max_depth must be >= 1");
  if (!(min_child_weight >= 0.0)) fail("min_child_weight must be >= 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) fail("subsample must lie in (0, 1]");
  if (!(colsample_bytree > 0.0 && colsample_bytree <= 1.0)) fail("colsample_bytree must lie in (0, 1]");
  if (n_iterations < 1) fail("n_iterations must be >= 1");
  if (!(l1 >= 0.0) || !(l2 >= 0.0)) fail("l1 and l2 must be >= 0");
  if (max_bins < 2 || max_bins > 256) fail("max_bins must lie in [2, 256]");
}

double GbdtTree::predict(std::span<const double> x) const {
  int n = 0;
  while (nodes[n].feature >= 0) {
    const auto& node = nodes[n];
    n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[n].value;
}

double GbdtEnsemble::predict(std::span<const double> x) const {
  double v = base;
  for (const auto& t : trees) v += t.predict(x);
  return v;
}

FeatureBins FeatureBins::build(const Eigen::MatrixXd& x, int max_bins) {
  FeatureBins out;
  out.edges.resize(static_cast<std::size_t>(x.cols()));
  std::vector<double> values;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    values.assign(x.col(f).data(), x.col(f).data() + x.rows());
    std::sort(values.begin(), values.end());
    std::vector<double> distinct = values;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto& e = out.edges[static_cast<std::size_t>(f)];
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      e.assign(distinct.begin(), distinct.end());
      if (!e.empty()) e.pop_back();
    } else {
      // Equal-frequency cut points.
      for (int q = 1; q < max_bins; ++q) {
        const auto pos = static_cast<std::size_t>(q) * values.size() / static_cast<std::size_t>(max_bins);
        const double edge = values[std::min(pos, values.size() - 1)];
        if (edge < values.back() && (e.empty() || edge > e.back())) e.push_back(edge);
      }
    }
  }
  return out;
}

int FeatureBins::bin(std::size_t feature, double value) const {
  const auto& e = edges[feature];
  return static_cast<int>(std::lower_bound(e.begin(), e.end(), value) - e.begin());
}

GbdtModel::GbdtModel(std::size_t inputs, GbdtHyper hyper, LossSpec loss,
                     std::vector<GbdtEnsemble> ensembles)
    : inputs_(inputs), hyper_(hyper), loss_(loss), ensembles_(std::move(ensembles)) {}

std::vector<double> GbdtModel::predict(std::span<const double> x) const {
  check_input(x);
  std::vector<double> out;
  out.reserve(ensembles_.size());
  for (const auto& e : ensembles_) out.push_back(e.predict(x));
  return out;
}

nlohmann::json GbdtModel::metadata() const {
  return {
      {"loss", {{"kind", std::string(to_string(loss_.kind))}, {"delta", loss_.delta}}},
      {"hyper",
       {{"eta", hyper_.eta},
        {"max_depth", hyper_.max_depth},
        {"min_child_weight", hyper_.min_child_weight},
        {"subsample", hyper_.subsample},
        {"colsample_bytree", hyper_.colsample_bytree},
        {"n_iterations", hyper_.n_iterations},
        {"l1", hyper_.l1},
        {"l2", hyper_.l2},
        {"max_bins", hyper_.max_bins},
        {"seed", hyper_.seed}}},
      // Subsampling draws row positions, so permuting training rows changes the model.
      {"row_order_sensitive", hyper_.subsample < 1.0 || hyper_.colsample_bytree < 1.0},
  };
}

void GbdtModel::write_payload(BinaryWriter& out) const {
  out.u64(inputs_);
  out.u64(ensembles_.size());
  for (const auto& e : ensembles_) {
    out.f64(e.base);
    out.u64(e.trees.size());
    for (const auto& t : e.trees) {
      out.u64(t.nodes.size());
      for (const auto& n : t.nodes) {
        out.i32(n.feature);
        out.f64(n.threshold);
        out.i32(n.left);
        out.i32(n.right);
        out.f64(n.value);
        out.f64(n.cover);
      }
    }
  }
}

std::unique_ptr<GbdtModel> GbdtModel::read_payload(const nlohmann::json& meta, BinaryReader& in) {
  GbdtHyper h;
  const auto& hj = meta.at("hyper");
  h.eta = hj.at("eta");
  h.max_depth = hj.at("max_depth");
  h.min_child_weight = hj.at("min_child_weight");
  h.subsample = hj.at("subsample");
  h.colsample_bytree = hj.at("colsample_bytree");
  h.n_iterations = hj.at("n_iterations");
  h.l1 = hj.at("l1");
  h.l2 = hj.at("l2");
  h.max_bins = hj.at("max_bins");
  h.seed = hj.at("seed");
  LossSpec loss;
  const auto kind = parse_loss_kind(meta.at("loss").at("kind").get<std::string>());
  if (!kind) throw InputError("model file has an unknown loss kind");
  loss.kind = *kind;
  loss.delta = meta.at("loss").at("delta");

  const auto inputs = in.count(1 << 20, "gbdt inputs");
  std::vector<GbdtEnsemble> ensembles(in.count(1 << 20, "gbdt outputs"));
  for (auto& e : ensembles) {
    e.base = in.f64();
    e.trees.resize(in.count(1 << 24, "gbdt trees"));
    for (auto& t : e.trees) {
      t.nodes.resize(in.count(1 << 24, "gbdt nodes"));
      for (auto& n : t.nodes) {
        n.feature = in.i32();
        n.threshold = in.f64();
        n.left = in.i32();
        n.right = in.i32();
        n.value = in.f64();
        n.cover = in.f64();
      }
      const auto size = static_cast<int>(t.nodes.size());
      for (const auto& n : t.nodes) {
        if (n.feature >= static_cast<int>(inputs) ||
            (n.feature >= 0 && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size))) {
          throw InputError("model file contains a malformed tree");
        }
      }
    }
  }
  return std::make_unique<GbdtModel>(inputs, h, loss, std::move(ensembles));
}

namespace {

double soft_threshold(double g, double alpha) {
  if (g > alpha) return g - alpha;
  if (g < -alpha) return g + alpha;
  return 0.0;
}

struct BinnedMatrix {
  std::size_t rows = 0;
  std::vector<std::vector<std::uint8_t>> columns;  // per feature
  std::vector<int> bin_count;
};

BinnedMatrix bin_matrix(const Eigen::MatrixXd& x, const FeatureBins& bins) {
  BinnedMatrix b;
  b.rows = static_cast<std::size_t>(x.rows());
  b.columns.resize(bins.edges.size());
  for (std::size_t f = 0; f < bins.edges.size(); ++f) {
    b.bin_count.push_back(static_cast<int>(bins.edges[f].size()) + 1);
    auto& col = b.columns[f];
    col.resize(b.rows);
    for (std::size_t r = 0; r < b.rows; ++r)
      col[r] = static_cast<std::uint8_t>(bins.bin(f, x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f))));
  }
  return b;
}

// Partial Fisher-Yates: k distinct indices from [0, n), returned ascending.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k >= n) return idx;
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

class OutputTrainer {
 public:
  OutputTrainer(const BinnedMatrix& x, const FeatureBins& bins, const Eigen::VectorXd& y,
                const GbdtHyper& hyper, const LossSpec& loss, std::uint64_t seed)
      : x_(x), bins_(bins), y_(y), hyper_(hyper), loss_(loss), rng_(seed) {}

  GbdtEnsemble train(std::vector<double>* loss_trace) {
    const std::size_t n = x_.rows;
    GbdtEnsemble ens;
    std::vector<double> residual(y_.data(), y_.data() + n);
    ens.base = leaf_optimal_value(loss_, residual);
    pred_.assign(n, ens.base);
    grad_.assign(n, 0.0);
    hess_.assign(n, 0.0);
    if (loss_trace) loss_trace->push_back(mean_loss());

    const std::size_t features = x_.columns.size();
    std::vector<std::size_t> splittable;
    for (std::size_t f = 0; f < features; ++f)
      if (x_.bin_count[f] > 1) splittable.push_back(f);

    const auto row_k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hyper_.subsample * static_cast<double>(n))));
    const auto col_k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hyper_.colsample_bytree * static_cast<double>(splittable.size()))));

    for (int round = 0; round < hyper_.n_iterations; ++round) {
      if (all_residuals_zero()) break;  // every later round would be a no-op
      const auto rows = sample_indices(n, row_k, rng_);
      std::vector<std::size_t> feats;
      for (auto k : sample_indices(splittable.size(), col_k, rng_)) feats.push_back(splittable[k]);

      for (auto r : rows) {
        const auto gh = loss_grad_hess(loss_, y_[static_cast<Eigen::Index>(r)], pred_[r]);
        grad_[r] = gh.gradient;
        hess_[r] = gh.hessian;
      }
      GbdtTree tree;
      buffer_ = rows;
      grow(tree, 0, buffer_.size(), 0, feats);
      for (std::size_t r = 0; r < n; ++r) pred_[r] += predict_binned(tree, r);
      const bool noop = tree.nodes.size() == 1 && tree.nodes[0].value == 0.0;
      if (!noop) ens.trees.push_back(std::move(tree));
      if (loss_trace) loss_trace->push_back(mean_loss());
    }
    return ens;
  }

  double final_rmse() const {
    double s = 0.0;
    for (std::size_t r = 0; r < x_.rows; ++r) {
      const double e = y_[static_cast<Eigen::Index>(r)] - pred_[r];
      s += e * e;
    }
    return std::sqrt(s / static_cast<double>(std::max<std::size_t>(1, x_.rows)));
  }

 private:
  struct Split {
    double gain = 0.0;
    std::size_t feature = 0;
    int bin = -1;
  };

  double mean_loss() const {
    double s = 0.0;
    for (std::size_t r = 0; r < x_.rows; ++r) s += loss_value(loss_, y_[static_cast<Eigen::Index>(r)], pred_[r]);
    return s / static_cast<double>(std::max<std::size_t>(1, x_.rows));
  }

  bool all_residuals_zero() const {
    for (std::size_t r = 0; r < x_.rows; ++r)
      if (y_[static_cast<Eigen::Index>(r)] != pred_[r]) return false;
    return true;
  }

  double score(double g, double h) const {
    const double t = soft_threshold(g, hyper_.l1);
    return t * t / (h + hyper_.l2);
  }

  // Node-local bin -> row mapping (split bins are recorded in split_bin_).
  double predict_binned(const GbdtTree& tree, std::size_t row) const {
    int n = 0;
    while (tree.nodes[n].feature >= 0) {
      const auto& node = tree.nodes[n];
      n = x_.columns[static_cast<std::size_t>(node.feature)][row] <= split_bin_[n] ? node.left : node.right;
    }
    return tree.nodes[n].value;
  }

  int grow(GbdtTree& tree, std::size_t begin, std::size_t end, int depth,
           const std::vector<std::size_t>& feats) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (split_bin_.size() < tree.nodes.size()) split_bin_.resize(tree.nodes.size() * 2, 0);

    double g = 0.0, h = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      g += grad_[buffer_[k]];
      h += hess_[buffer_[k]];
    }
    tree.nodes[id].cover = h;

    Split best;
    if (depth < hyper_.max_depth && h >= 2.0 * hyper_.min_child_weight && end - begin >= 2) {
      best = find_split(begin, end, g, h, feats);
    }
    if (best.bin < 0) {
      tree.nodes[id].value = leaf_value(begin, end, h);
      return id;
    }

    const auto& col = x_.columns[best.feature];
    const auto mid = std::stable_partition(buffer_.begin() + static_cast<std::ptrdiff_t>(begin),
                                           buffer_.begin() + static_cast<std::ptrdiff_t>(end),
                                           [&](std::size_t r) { return col[r] <= best.bin; });
    const auto split_at = static_cast<std::size_t>(mid - buffer_.begin());

    tree.nodes[id].feature = static_cast<int>(best.feature);
    tree.nodes[id].threshold = bins_.edges[best.feature][static_cast<std::size_t>(best.bin)];
    split_bin_[static_cast<std::size_t>(id)] = best.bin;
    const int left = grow(tree, begin, split_at, depth + 1, feats);
    const int right = grow(tree, split_at, end, depth + 1, feats);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    return id;
  }

  Split find_split(std::size_t begin, std::size_t end, double g, double h,
                   const std::vector<std::size_t>& feats) {
    Split best;
    const double parent = score(g, h);
    for (std::size_t f : feats) {
      const int nb = x_.bin_count[f];
      hist_g_.assign(static_cast<std::size_t>(nb), 0.0);
      hist_h_.assign(static_cast<std::size_t>(nb), 0.0);
      const auto& col = x_.columns[f];
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t r = buffer_[k];
        hist_g_[col[r]] += grad_[r];
        hist_h_[col[r]] += hess_[r];
      }
      double gl = 0.0, hl = 0.0;
      for (int b = 0; b + 1 < nb; ++b) {
        gl += hist_g_[static_cast<std::size_t>(b)];
        hl += hist_h_[static_cast<std::size_t>(b)];
        const double hr = h - hl;
        if (hl < hyper_.min_child_weight || hr < hyper_.min_child_weight) continue;
        if (hl <= 0.0 || hr <= 0.0) continue;
        const double gain = 0.5 * (score(gl, hl) + score(g - gl, hr) - parent);
        if (gain > best.gain + 1e-12) best = {gain, f, b};
      }
    }
    return best;
  }

  double leaf_value(std::size_t begin, std::size_t end, double h) {
    leaf_residuals_.clear();
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t r = buffer_[k];
      leaf_residuals_.push_back(y_[static_cast<Eigen::Index>(r)] - pred_[r]);
    }
    const double c = leaf_optimal_value(loss_, leaf_residuals_);
    return hyper_.eta * c * (h / (h + hyper_.l2));
  }

  const BinnedMatrix& x_;
  const FeatureBins& bins_;
  const Eigen::VectorXd& y_;
  const GbdtHyper& hyper_;
  const LossSpec& loss_;
  Rng rng_;
  std::vector<double> pred_, grad_, hess_;
  std::vector<std::size_t> buffer_;
  std::vector<int> split_bin_;
  std::vector<double> hist_g_, hist_h_, leaf_residuals_;
};

}  // namespace

GbdtModel fit_gbdt(const Dataset& data, const GbdtHyper& hyper, const LossSpec& loss,
                   GbdtDiagnostics* diagnostics) {
  hyper.validate();
  loss.validate();
  data.validate();
  if (static_cast<double>(data.rows()) < 2.0 * hyper.min_child_weight || data.rows() < 2) {
    throw InputError("gbdt needs at least 2 * min_child_weight rows (have " +
                     std::to_string(data.rows()) + ")");
  }
  const FeatureBins bins = FeatureBins::build(data.x, hyper.max_bins);
  const BinnedMatrix binned = bin_matrix(data.x, bins);
  const std::size_t outputs = data.outputs();

  std::vector<GbdtEnsemble> ensembles(outputs);
  std::vector<std::vector<double>> traces(diagnostics ? outputs : 0);
  std::vector<double> rmse(outputs, 0.0);
  std::vector<Eigen::VectorXd> targets(outputs);
  for (std::size_t o = 0; o < outputs; ++o) targets[o] = data.y.col(static_cast<Eigen::Index>(o));

  parallel_for(outputs, [&](std::size_t o) {
    OutputTrainer trainer(binned, bins, targets[o], hyper, loss,
                          derive_seed(hyper.seed, Stream::kGbdt, o));
    ensembles[o] = trainer.train(diagnostics ? &traces[o] : nullptr);
    rmse[o] = trainer.final_rmse();
  });
  if (diagnostics) {
    diagnostics->train_loss = std::move(traces);
    diagnostics->train_rmse = std::move(rmse);
  }
  return GbdtModel(data.inputs(), hyper, loss, std::move(ensembles));
}

}  // namespace surropt
