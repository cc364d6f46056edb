#include "splatsim/workload.hpp"

#include "splatsim/preprocess.hpp"
#include "splatsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace splatsim {
namespace {

constexpr std::uint64_t kCountSalt = 0x636f756e74ull;  // "count"
constexpr std::uint64_t kTermSalt = 0x7465726dull;     // "term"
constexpr std::uint64_t kSceneSalt = 0x7363656e65ull;  // "scene"

}  // namespace

std::string_view distribution_name(SkewDistribution d) {
  switch (d) {
    case SkewDistribution::Pareto: return "pareto";
    case SkewDistribution::Lognormal: return "lognormal";
    case SkewDistribution::Uniform: return "uniform";
  }
  return "?";
}

std::optional<SkewDistribution> distribution_from_name(std::string_view name) {
  if (name == "pareto") return SkewDistribution::Pareto;
  if (name == "lognormal") return SkewDistribution::Lognormal;
  if (name == "uniform") return SkewDistribution::Uniform;
  return std::nullopt;
}

SyntheticLoads gen_tile_loads(const SkewParams& params) {
  if (params.tiles <= 0 || !(params.shape > 0.0) || !(params.scale >= 0.0) || params.max_cap < 1)
    throw std::invalid_argument("gen_tile_loads: invalid params");
  SyntheticLoads loads;
  loads.params = params;
  loads.tiles.resize(params.tiles);
  for (int t = 0; t < params.tiles; ++t) {
    Rng rng(params.seed ^ kCountSalt, static_cast<std::uint64_t>(t));
    double draw = 0.0;
    switch (params.distribution) {
      case SkewDistribution::Pareto:
        draw = rng.pareto(params.shape, params.scale);
        break;
      case SkewDistribution::Lognormal:
        draw = rng.lognormal(params.shape, params.scale);
        break;
      case SkewDistribution::Uniform:
        draw = params.scale;
        break;
    }
    const double capped = std::min(static_cast<double>(params.max_cap), std::floor(draw));
    loads.tiles[t].count = static_cast<std::uint32_t>(std::max(0.0, capped));
    loads.tiles[t].term_profile = static_cast<std::uint32_t>(t);
  }
  return loads;
}

std::vector<std::int32_t> tile_pixel_steps(const SkewParams& params, std::uint32_t term_profile,
                                           std::uint32_t count) {
  std::vector<std::int32_t> steps(kBlockThreads, 0);
  if (count == 0) return steps;
  const TermModel& tm = params.term;
  const double mean = std::clamp(tm.mean, 1e-6, 1.0);
  const double k = 1.0 / mean - 1.0;
  Rng rng(params.seed ^ kTermSalt, term_profile);
  for (int p = 0; p < kBlockThreads; ++p) {
    const double u = rng.uniform();
    const double frac = (1.0 - tm.spread) * mean + tm.spread * std::pow(u, k);
    if (frac >= 1.0) {
      steps[p] = static_cast<std::int32_t>(count);  // runs the whole list
    } else {
      const auto s = static_cast<std::int32_t>(std::ceil(frac * count));
      steps[p] = std::clamp(s, 1, static_cast<std::int32_t>(count));
    }
  }
  return steps;
}

std::vector<TileWork> loads_to_work(const SyntheticLoads& loads) {
  std::vector<TileWork> work(loads.tiles.size());
  for (std::size_t t = 0; t < loads.tiles.size(); ++t) {
    work[t].list_len = static_cast<std::int32_t>(loads.tiles[t].count);
    work[t].consumed =
        tile_pixel_steps(loads.params, loads.tiles[t].term_profile, loads.tiles[t].count);
  }
  return work;
}

TileHistogram loads_histogram(const SyntheticLoads& loads) {
  TileHistogram h;
  h.counts.reserve(loads.tiles.size());
  for (const TileLoad& t : loads.tiles) h.counts.push_back(t.count);
  if (h.counts.empty()) return h;
  std::vector<std::uint32_t> sorted = h.counts;
  std::sort(sorted.begin(), sorted.end());
  h.min = sorted.front();
  h.max = sorted.back();
  h.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
  auto rank = [&](double q) {
    std::size_t idx = static_cast<std::size_t>(std::ceil(q * sorted.size()));
    return sorted[std::min(sorted.size() - 1, idx == 0 ? 0 : idx - 1)];
  };
  h.p50 = rank(0.50);
  h.p99 = rank(0.99);
  return h;
}

std::string loads_csv(const SyntheticLoads& loads) {
  const SkewParams& p = loads.params;
  std::ostringstream out;
  out.precision(17);
  out << "# dist=" << distribution_name(p.distribution) << " shape=" << p.shape
      << " scale=" << p.scale << " cap=" << p.max_cap << " tiles=" << p.tiles << " seed=" << p.seed
      << " term_mean=" << p.term.mean << " term_spread=" << p.term.spread << "\n";
  out << "tile_id,count,term_profile_id\n";
  for (std::size_t t = 0; t < loads.tiles.size(); ++t)
    out << t << ',' << loads.tiles[t].count << ',' << loads.tiles[t].term_profile << "\n";
  return out.str();
}

SyntheticLoads parse_loads_csv(const std::string& text) {
  SyntheticLoads loads;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "dist") {
          auto d = distribution_from_name(val);
          if (!d) throw std::runtime_error("loads file: unknown distribution " + val);
          loads.params.distribution = *d;
        } else if (key == "shape") {
          loads.params.shape = std::stod(val);
        } else if (key == "scale") {
          loads.params.scale = std::stod(val);
        } else if (key == "cap") {
          loads.params.max_cap = static_cast<std::uint32_t>(std::stoul(val));
        } else if (key == "tiles") {
          loads.params.tiles = std::stoi(val);
        } else if (key == "seed") {
          loads.params.seed = std::stoull(val);
        } else if (key == "term_mean") {
          loads.params.term.mean = std::stod(val);
        } else if (key == "term_spread") {
          loads.params.term.spread = std::stod(val);
        }
      }
      continue;
    }
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    TileLoad tl;
    if (!std::getline(row, cell, ',')) throw std::runtime_error("loads file: bad row: " + line);
    if (!std::getline(row, cell, ',')) throw std::runtime_error("loads file: bad row: " + line);
    tl.count = static_cast<std::uint32_t>(std::stoul(cell));
    if (!std::getline(row, cell, ',')) throw std::runtime_error("loads file: bad row: " + line);
    tl.term_profile = static_cast<std::uint32_t>(std::stoul(cell));
    loads.tiles.push_back(tl);
  }
  if (loads.tiles.empty()) throw std::runtime_error("loads file: no rows");
  return loads;
}

SyntheticLoads load_loads(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open loads file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_loads_csv(ss.str());
}

void save_loads(const SyntheticLoads& loads, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << loads_csv(loads);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Gaussian3D> gen_clustered_scene(const ClusterSceneParams& params, const Camera& cam) {
  if (params.n_gaussians < 0 || params.n_clusters < 1)
    throw std::invalid_argument("gen_clustered_scene: invalid params");
  std::vector<Gaussian3D> out;
  out.reserve(params.n_gaussians);
  Rng rng(params.seed ^ kSceneSalt, 0);

  const double fx = cam.focal.x(), fy = cam.focal.y();
  struct Center {
    double x, y, z;
  };
  std::vector<Center> centers(params.n_clusters);
  for (Center& c : centers) {
    const double u = rng.uniform(0.12, 0.88) * cam.width;
    const double v = rng.uniform(0.12, 0.88) * cam.height;
    c.z = rng.uniform(3.0, 8.0);
    c.x = (u - 0.5 * cam.width) * c.z / fx;
    c.y = (v - 0.5 * cam.height) * c.z / fy;
  }

  for (int i = 0; i < params.n_gaussians; ++i) {
    Gaussian3D g;
    const bool background = rng.uniform() < params.background_fraction;
    if (background) {
      const double z = rng.uniform(3.0, 9.0);
      g.mean = {static_cast<float>((rng.uniform(0.05, 0.95) * cam.width - 0.5 * cam.width) * z / fx),
                static_cast<float>((rng.uniform(0.05, 0.95) * cam.height - 0.5 * cam.height) * z / fy),
                static_cast<float>(z)};
    } else {
      const Center& c = centers[rng.below(centers.size())];
      const double sigma = params.cluster_sigma * c.z;
      g.mean = {static_cast<float>(c.x + sigma * rng.normal()),
                static_cast<float>(c.y + sigma * rng.normal()),
                static_cast<float>(std::max(0.5, c.z + sigma * rng.normal()))};
    }
    const double base = 0.01 * static_cast<double>(g.mean.z());
    for (int a = 0; a < 3; ++a)
      g.scale[a] = static_cast<float>(base * std::exp(0.4 * rng.normal()));
    Eigen::Vector4d q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    q.normalize();
    g.rotation = Eigen::Quaternionf(static_cast<float>(q[0]), static_cast<float>(q[1]),
                                    static_cast<float>(q[2]), static_cast<float>(q[3]));
    g.opacity = static_cast<float>(rng.uniform(0.2, 0.95));
    g.color = {static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()),
               static_cast<float>(rng.uniform())};
    out.push_back(g);
  }
  return out;
}

SkewParams trajectory_params_at(const TrajectoryParams& tp, int iter) {
  if (iter < 0 || iter >= tp.total_iters)
    throw std::out_of_range("trajectory_params_at: iter out of range");
  const double x = tp.total_iters > 1 ? static_cast<double>(iter) / (tp.total_iters - 1) : 0.0;
  SkewParams p = tp.start;
  // Cap decays geometrically; the tile draws themselves are a fixed
  // population (same seed), so counts only ever shrink.
  const double log_cap = std::log(static_cast<double>(tp.start.max_cap)) * (1.0 - x) +
                         std::log(static_cast<double>(tp.cap_end)) * x;
  p.max_cap = static_cast<std::uint32_t>(std::llround(std::exp(log_cap)));
  p.max_cap = std::max<std::uint32_t>(1, p.max_cap);
  p.term.mean = tp.start.term.mean * (1.0 - x) + tp.term_end.mean * x;
  p.term.spread = tp.start.term.spread * (1.0 - x) + tp.term_end.spread * x;
  return p;
}

SyntheticLoads trajectory_loads(const TrajectoryParams& tp, int iter) {
  return gen_tile_loads(trajectory_params_at(tp, iter));
}

}  // namespace splatsim
