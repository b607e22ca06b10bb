#include "treepca/pca.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treepca/errors.hpp"
#include "treepca/format.hpp"
#include "treepca/geodesic.hpp"
#include "treepca/moves.hpp"
#include "treepca/parallel.hpp"

namespace treepca {

ProposalKernel ProposalKernel::data_resample() { return ProposalKernel{}; }

ProposalKernel ProposalKernel::beta_blend(double alpha, double beta) {
  ProposalKernel k;
  k.kind = KernelKind::beta_blend;
  k.alpha = alpha;
  k.beta = beta;
  k.validate();
  return k;
}

ProposalKernel ProposalKernel::random_walk(int steps, double step_size) {
  ProposalKernel k;
  k.kind = KernelKind::random_walk;
  k.steps = steps;
  k.step_size = step_size;
  k.validate();
  return k;
}

void ProposalKernel::validate() const {
  if (kind == KernelKind::beta_blend && !(alpha > 0.0 && beta > 0.0))
    throw ParameterOutOfRange("beta_blend needs alpha > 0 and beta > 0");
  if (kind == KernelKind::random_walk) {
    if (steps < 1) throw ParameterOutOfRange("random_walk needs at least one step");
    if (!(step_size > 0.0)) throw ParameterOutOfRange("random_walk needs a positive step size");
  }
}

std::string ProposalKernel::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case KernelKind::data_resample:
      return "data_resample";
    case KernelKind::beta_blend:
      out << "beta_blend(" << format_number(alpha) << "," << format_number(beta) << ")";
      break;
    case KernelKind::random_walk:
      out << "random_walk(" << steps << "," << format_number(step_size) << ")";
      break;
  }
  return out.str();
}

namespace {

const PhyloTree& draw_datum(const std::vector<PhyloTree>& data, std::mt19937_64& rng) {
  if (data.empty()) throw EmptyData("proposal needs at least one data tree");
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  return data[pick(rng)];
}

double draw_beta(double alpha, double beta, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(alpha, 1.0), gb(beta, 1.0);
  const double a = ga(rng);
  const double b = gb(rng);
  return a + b > 0.0 ? a / (a + b) : 0.5;
}

}  // namespace

PhyloTree propose(const ProposalKernel& kernel, const PhyloTree& x, const std::vector<PhyloTree>& data, std::mt19937_64& rng) {
  kernel.validate();
  switch (kernel.kind) {
    case KernelKind::data_resample:
      return draw_datum(data, rng);
    case KernelKind::beta_blend: {
      const PhyloTree& z = draw_datum(data, rng);
      const double t = draw_beta(kernel.alpha, kernel.beta, rng);
      // pendants are carried along so the proposal stays a complete tree
      return Geodesic(x, z, PendantMode::include).at(t);
    }
    case KernelKind::random_walk:
      return random_walk(x, kernel.steps, kernel.step_size, rng);
  }
  return x;
}

std::vector<ProposalKernel> default_kernels(double scale) {
  return {ProposalKernel::data_resample(), ProposalKernel::beta_blend(2.0, 2.0),
          ProposalKernel::random_walk(1, 0.05 * scale), ProposalKernel::random_walk(5, 0.02 * scale)};
}

namespace {

struct RestartResult {
  std::vector<PhyloTree> vertices;
  std::vector<TracePoint> trace;
};

double search_objective(const std::vector<PhyloTree>& data, const std::vector<PhyloTree>& vertices, const ProjectorConfig& config) {
  const auto projections = project_all(data, VertexSet(vertices), config);
  double total = 0.0;
  for (const auto& p : projections) total += p.distance * p.distance;
  return total;
}

std::vector<PhyloTree> initial_vertices(const std::vector<PhyloTree>& data, int count, std::mt19937_64& rng) {
  std::vector<std::size_t> index(data.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  // partial Fisher-Yates, preferring trees not already chosen
  std::vector<PhyloTree> out;
  std::size_t next = 0;
  std::vector<std::size_t> repeats;
  while (static_cast<int>(out.size()) < count && next < index.size()) {
    std::uniform_int_distribution<std::size_t> pick(next, index.size() - 1);
    std::swap(index[next], index[pick(rng)]);
    const PhyloTree& t = data[index[next++]];
    const bool seen = std::any_of(out.begin(), out.end(), [&](const PhyloTree& v) { return v.equals(t); });
    if (seen)
      repeats.push_back(index[next - 1]);
    else
      out.push_back(t);
  }
  for (std::size_t i = 0; static_cast<int>(out.size()) < count; ++i) out.push_back(data[repeats[i]]);
  return out;
}

RestartResult run_search(const std::vector<PhyloTree>& data, const FitOptions& options, const std::vector<ProposalKernel>& kernels,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProjectorConfig config = options.search;
  config.seed = derive_seed(seed, 1);
  config.threads = options.threads;
  config.geometric.pendant = options.pendant;

  RestartResult out;
  out.vertices = initial_vertices(data, options.order + 1, rng);
  double current = search_objective(data, out.vertices, config);
  std::vector<double> history{current};
  out.trace.push_back({0, current});
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (std::size_t j = 0; j < out.vertices.size(); ++j) {
      for (const auto& kernel : kernels) {
        auto candidate = out.vertices;
        candidate[j] = propose(kernel, out.vertices[j], data, rng);
        const double value = search_objective(data, candidate, config);
        if (value < current) {
          current = value;
          out.vertices = std::move(candidate);
        }
      }
    }
    history.push_back(current);
    out.trace.push_back({sweep, current});
    if (current <= 0.0) break;
    if (sweep >= options.conv_window) {
      const double before = history[static_cast<std::size_t>(sweep - options.conv_window)];
      if ((before - current) / before < options.conv_threshold) break;
    }
  }
  return out;
}

}  // namespace

FittedComponent fit_component(const std::vector<PhyloTree>& data, const FitOptions& options) {
  if (data.empty()) throw EmptyData("no data trees to fit");
  if (options.order < 1) throw ParameterOutOfRange("order must be at least 1");
  if (data.size() < static_cast<std::size_t>(options.order) + 1)
    throw InsufficientData("need at least order + 1 data trees");
  if (options.restarts < 1) throw ParameterOutOfRange("restarts must be at least 1");
  if (options.conv_window < 1) throw ParameterOutOfRange("conv_window must be at least 1");
  if (!(options.conv_threshold >= 0.0)) throw ParameterOutOfRange("conv_threshold must be nonnegative");
  auto kernels = options.kernels.empty() ? default_kernels(data_scale(data, options.pendant)) : options.kernels;
  for (const auto& k : kernels) k.validate();
  FitOptions resolved = options;
  if (resolved.search.geometric.eps <= 0.0) resolved.search.geometric.eps = options.search_eps_scale * data_scale(data, options.pendant);

  ProjectorConfig report = options.report;
  report.threads = options.threads;
  report.geometric.pendant = options.pendant;

  std::vector<RestartResult> runs;
  std::vector<FitStatistics> stats;
  std::vector<double> restart_sum_sq;
  std::size_t best = 0;
  for (int r = 0; r < options.restarts; ++r) {
    const std::uint64_t seed = derive_seed(options.seed, static_cast<std::uint64_t>(r));
    runs.push_back(run_search(data, resolved, kernels, seed));
    report.seed = derive_seed(seed, 2);
    stats.push_back(sum_sq_projected(data, VertexSet(runs.back().vertices), report));
    restart_sum_sq.push_back(stats.back().sum_sq_projected);
    if (stats.back().sum_sq_projected < stats[best].sum_sq_projected) best = runs.size() - 1;
  }
  return FittedComponent{options.order,
                         VertexSet(std::move(runs[best].vertices)),
                         std::move(stats[best]),
                         std::move(runs[best].trace),
                         options.seed,
                         static_cast<int>(best),
                         std::move(restart_sum_sq)};
}

FittedComponent fit_principal_geodesic(const std::vector<PhyloTree>& data, FitOptions options) {
  options.order = 1;
  return fit_component(data, options);
}

}  // namespace treepca
