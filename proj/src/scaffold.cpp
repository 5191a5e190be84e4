#include "smoothset/scaffold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "json.hpp"
#include "smoothset/parallel.hpp"
#include "smoothset/smoothgen.hpp"
#include "smoothset/transform.hpp"

namespace smoothset {

namespace {

std::uint64_t pack(const DyadicCube& q) {
  return (static_cast<std::uint64_t>(q.level) << 58) | (static_cast<std::uint64_t>(q.index[0]) << 29) |
         static_cast<std::uint64_t>(q.index[1]);
}

double family_volume(const std::vector<CubeDensity>& f) {
  double v = 0.0;
  for (const auto& m : f) v += m.cube.volume();
  return v;
}

}  // namespace

double StoppedFamily::plus_volume() const { return family_volume(plus); }
double StoppedFamily::minus_volume() const { return family_volume(minus); }

double StoppedFamily::partition_residual() const {
  double r = undecidedMoment;
  for (const auto& m : plus) r += (m.density - parentDensity) * m.cube.volume();
  for (const auto& m : minus) r += (m.density - parentDensity) * m.cube.volume();
  return r;
}

double StoppedFamily::volume_residual() const {
  return plus_volume() + minus_volume() + undecidedMass - parent.volume();
}

StoppedFamily stop_family_unchecked(const MassGrid& grid, const DyadicCube& parent, double eps) {
  require(parent.dim == grid.dim(), "cube dimension does not match grid");
  require(eps > 0.0, "stopping threshold must be positive");
  const int K = grid.level();
  require(parent.level <= K, "parent finer than the grid resolution");
  StoppedFamily fam;
  fam.parent = parent;
  fam.eps = eps;
  fam.parentDensity = grid.cube_density(parent);
  const double cellVol = grid.cell_volume();
  auto leave_undecided = [&](double d) {
    // q is at level K here, a single resolution cell
    ++fam.undecidedCells;
    fam.undecidedMoment += (d - fam.parentDensity) * cellVol;
  };
  if (parent.level == K) {
    leave_undecided(fam.parentDensity);
    fam.undecidedMass = cellVol;
    fam.visited = 1;
    return fam;
  }
  std::vector<DyadicCube> frontier{parent}, next;
  for (int level = parent.level + 1; level <= K && !frontier.empty(); ++level) {
    next.clear();
    for (const auto& q : frontier) {
      for (const auto& c : children(q)) {
        ++fam.visited;
        const double d = grid.cube_density(c);
        if (d - fam.parentDensity >= eps) {
          fam.plus.push_back({c, d});
        } else if (fam.parentDensity - d >= eps) {
          fam.minus.push_back({c, d});
        } else if (level == K) {
          leave_undecided(d);
        } else {
          next.push_back(c);
        }
      }
    }
    frontier.swap(next);
  }
  fam.undecidedMass = static_cast<double>(fam.undecidedCells) * cellVol;
  return fam;
}

StoppedFamily stop_family(const MassGrid& grid, const DyadicCube& parent, double eps,
                          std::optional<double> omegaAtParent) {
  require(parent.level < grid.level(), "parent level must be below the resolution");
  const double d = grid.cube_density(parent);
  const double hi = std::min(d, 1.0 - d);
  if (!(eps > 0.0 && eps < hi))
    throw Error(ErrorKind::EpsilonOutsideWindow, "epsilon outside admissible window");
  if (omegaAtParent && !(grid.dim() * *omegaAtParent < eps))
    throw Error(ErrorKind::EpsilonOutsideWindow, "epsilon outside admissible window");
  return stop_family_unchecked(grid, parent, eps);
}

bool is_maximal(const StoppedFamily& fam) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto* f : {&fam.plus, &fam.minus})
    for (const auto& m : *f)
      if (!seen.insert(pack(m.cube)).second) return false;
  for (const auto* f : {&fam.plus, &fam.minus})
    for (const auto& m : *f) {
      if (!fam.parent.contains(m.cube) || m.cube == fam.parent) return false;
      DyadicCube a = m.cube;
      while (a.level > fam.parent.level + 1) {
        a = a.parent();
        if (seen.count(pack(a))) return false;
      }
    }
  return true;
}

Lemma2Report verify_lemma2(const StoppedFamily& fam, const ModulusProfile& omega) {
  Lemma2Report r;
  const double vol = fam.parent.volume();
  r.omega = omega.envelope_at(fam.parent.level);
  r.volumeBound = r.omega > 0.0 ? std::exp2(-fam.eps / r.omega) * vol : 0.0;
  for (const auto* f : {&fam.plus, &fam.minus})
    for (const auto& m : *f) r.largestMember = std::max(r.largestMember, m.cube.volume());
  r.partA = r.largestMember <= r.volumeBound * (1.0 + 1e-12);
  r.threshold = vol / 4.0 - fam.undecidedMass;
  r.plusVolume = fam.plus_volume();
  r.minusVolume = fam.minus_volume();
  r.plusMargin = r.plusVolume - r.threshold;
  r.minusMargin = r.minusVolume - r.threshold;
  r.vacuous = r.threshold <= 0.0;
  r.partB = r.plusMargin >= -1e-12 && r.minusMargin >= -1e-12;
  if (r.vacuous) r.note = "vacuous at resolution";
  return r;
}

double lemma1_bound(double P, double C, int n) {
  require(P > 0.0 && C < 1.0 && P < C, "need 0 < P < C < 1");
  return n * (1.0 - std::log2(C) / std::log2(P));
}

std::size_t Scaffold::total_violations() const {
  std::size_t v = 0;
  for (const auto& s : stats)
    v += s.sandwichViolations + s.stopVolumeViolations + s.memberVolumeViolations + s.retainedViolations +
         s.postconditionViolations + s.windowViolations + s.sizeViolations + s.nestingViolations;
  return v;
}

namespace {

// Everything one parent Q contributes to the next generation.
struct ParentOutcome {
  std::vector<CubeDensity> members;
  std::size_t stopped = 0;
  double retained = 0.0;
  double undecided = 0.0;
  double P = 0.0;
  bool exhausted = false;
  GenerationStats counts;
};

ParentOutcome grow(const MassGrid& grid, const CubeDensity& Q, int s, const Scaffold& sc,
                   const ModulusProfile& omega) {
  ParentOutcome out;
  const int n = grid.dim();
  const int K = grid.level();
  const double alpha = sc.alpha;
  const double eps = sc.eps[s - 1];
  const double epsNext = sc.eps[s];
  const double cs = sc.c[s - 1];
  const double volQ = Q.cube.volume();
  const double capVol = std::exp2(-cs) * volQ;
  auto& cnt = out.counts;

  if (Q.cube.level >= K) {
    out.exhausted = true;
    out.undecided = volQ;
    return out;
  }
  if (!(n * omega.envelope_at(Q.cube.level) < eps && eps < std::min(Q.density, 1.0 - Q.density)))
    ++cnt.windowViolations;
  const auto R = stop_family_unchecked(grid, Q.cube, eps);
  out.undecided += R.undecidedMass;
  if (R.undecidedCells > 0) out.exhausted = true;

  std::unordered_set<std::uint64_t> checked;
  for (const auto* side : {&R.plus, &R.minus}) {
    for (const auto& r : *side) {
      ++out.stopped;
      if (r.cube.volume() > capVol * (1.0 + 1e-12)) ++cnt.stopVolumeViolations;
      const double e = std::abs(r.density - alpha);
      const bool lower = r.density > alpha;  // move down toward alpha
      if (r.cube.level >= K || e <= 0.0) {
        out.undecided += r.cube.volume();
        out.exhausted = out.exhausted || r.cube.level >= K;
        continue;
      }
      if (!(n * omega.envelope_at(r.cube.level) < e && e < std::min(r.density, 1.0 - r.density)))
        ++cnt.windowViolations;
      const auto fam = stop_family_unchecked(grid, r.cube, e);
      out.undecided += fam.undecidedMass;
      if (fam.undecidedCells > 0) out.exhausted = true;
      for (const auto& m : lower ? fam.minus : fam.plus) {
        out.members.push_back(m);
        const double v = m.cube.volume();
        out.retained += v;
        out.P = std::max(out.P, v / volQ);
        if (v > capVol * (1.0 + 1e-12)) ++cnt.memberVolumeViolations;
        if (!(std::abs(m.density - alpha) < epsNext / 2.0)) ++cnt.postconditionViolations;
        if (m.cube.level < s + 1 + sc.k0) ++cnt.sizeViolations;
        if (!Q.cube.contains(m.cube)) ++cnt.nestingViolations;
        for (DyadicCube a = m.cube;; a = a.parent()) {
          if (checked.insert(pack(a)).second) {
            ++cnt.sandwichChecks;
            if (std::abs(grid.cube_density(a) - alpha) > 6.0 * eps + 1e-12) ++cnt.sandwichViolations;
          }
          if (a.level <= Q.cube.level) break;
        }
      }
    }
  }
  if (out.retained < volQ / 4.0 - out.undecided - 1e-12) ++cnt.retainedViolations;
  return out;
}

}  // namespace

Scaffold build_generations(const MassGrid& grid, const ScheduleParams& p, const ModulusProfile& omega) {
  require(p.alpha > 0.0 && p.alpha < 1.0, "alpha must lie in (0,1)");
  require(p.maxGen >= 1, "maxGen must be at least 1");
  const int n = grid.dim();
  const int K = grid.level();
  const double m = std::min(p.alpha, 1.0 - p.alpha);

  Scaffold sc;
  sc.dim = n;
  sc.alpha = p.alpha;
  if (p.k0 >= 0) {
    require(p.k0 <= K, "k0 beyond resolution");
    sc.k0 = p.k0;
    sc.k0ConditionMet = omega.envelope_at(p.k0) < m / 20.0;
  } else {
    sc.k0 = 0;
    for (int L = 0; L <= K; ++L)
      if (omega.envelope_at(L) < m / 20.0) {
        sc.k0 = L;
        sc.k0ConditionMet = true;
        break;
      }
  }
  // eps_{maxGen} is needed for the postcondition of the last transition.
  for (int k = 1; k <= p.maxGen; ++k) {
    const double c = k - 1 < static_cast<int>(p.c.size()) ? p.c[k - 1] : 2.0 * n + k;
    require(c >= 2.0 * n, "c_k must be at least 2n");
    if (!sc.c.empty()) require(c >= sc.c.back(), "c_k must be non-decreasing");
    sc.c.push_back(c);
    sc.omega.push_back(omega.envelope_at(k + sc.k0));
    sc.eps.push_back(c * sc.omega.back());
  }
  sc.epsConditionMet = std::all_of(sc.eps.begin(), sc.eps.end(), [&](double e) { return e < m / 10.0; });

  const bool flat = sc.eps[0] <= 0.0;
  bool found = false;
  for (int L = sc.k0 + 1; L <= K && !found; ++L) {
    const std::int64_t side = std::int64_t{1} << L;
    for (std::int64_t a = 0; a < side && !found; ++a)
      for (std::int64_t b = 0; b < (n == 2 ? side : 1) && !found; ++b) {
        DyadicCube q{n, L, Index2(a, b)};
        const double d = grid.cube_density(q);
        const bool ok = flat ? std::abs(d - p.alpha) <= kQuantum : std::abs(d - p.alpha) < sc.eps[0] / 2.0;
        if (ok) {
          sc.seed = {q, d};
          found = true;
        }
      }
  }
  if (!found) throw Error(ErrorKind::TrivialSet, "set too trivial at this resolution");
  sc.generations.push_back({sc.seed});

  for (int s = 1; s < p.maxGen; ++s) {
    if (sc.eps[s - 1] <= 0.0) {
      sc.truncated = true;
      sc.flag = "no oscillation";
      break;
    }
    const auto& G = sc.generations.back();
    std::vector<ParentOutcome> outcomes(G.size());
    parallel_chunks(G.size(), 1, [&](std::size_t i, std::size_t, std::size_t) {
      outcomes[i] = grow(grid, G[i], s, sc, omega);
    });
    GenerationStats st;
    st.generation = s;
    st.eps = sc.eps[s - 1];
    st.omega = sc.omega[s - 1];
    st.c = sc.c[s - 1];
    st.parents = G.size();
    st.Craw = std::numeric_limits<double>::infinity();
    st.Cadjusted = std::numeric_limits<double>::infinity();
    std::vector<CubeDensity> next;
    double undecided = 0.0, parentVol = 0.0;
    bool exhausted = false;
    for (std::size_t i = 0; i < G.size(); ++i) {
      auto& o = outcomes[i];
      const double v = G[i].cube.volume();
      parentVol += v;
      undecided += o.undecided;
      exhausted = exhausted || o.exhausted;
      st.stopped += o.stopped;
      st.P = std::max(st.P, o.P);
      st.Craw = std::min(st.Craw, o.retained / v);
      st.Cadjusted = std::min(st.Cadjusted, (o.retained + o.undecided) / v);
      const auto& c = o.counts;
      st.sandwichChecks += c.sandwichChecks;
      st.sandwichViolations += c.sandwichViolations;
      st.stopVolumeViolations += c.stopVolumeViolations;
      st.memberVolumeViolations += c.memberVolumeViolations;
      st.retainedViolations += c.retainedViolations;
      st.postconditionViolations += c.postconditionViolations;
      st.windowViolations += c.windowViolations;
      st.sizeViolations += c.sizeViolations;
      st.nestingViolations += c.nestingViolations;
      next.insert(next.end(), o.members.begin(), o.members.end());
    }
    st.members = next.size();
    st.undecided = parentVol > 0.0 ? undecided / parentVol : 0.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    st.dimBound = st.P > 0.0 && st.P < st.Craw && st.Craw < 1.0 ? lemma1_bound(st.P, st.Craw, n) : nan;
    st.dimBoundAdjusted =
        st.P > 0.0 && st.P < st.Cadjusted && st.Cadjusted < 1.0 ? lemma1_bound(st.P, st.Cadjusted, n) : nan;
    sc.stats.push_back(st);
    sc.perGenP.push_back(st.P);
    sc.perGenC.push_back(st.Craw);
    sc.perGenCAdjusted.push_back(st.Cadjusted);
    sc.dimBound.push_back(st.dimBound);
    sc.undecided = st.undecided;
    if (next.empty()) {
      sc.truncated = true;
      sc.flag = exhausted ? "resolution exhausted" : "no oscillation";
      break;
    }
    sc.generations.push_back(std::move(next));
  }
  if (!sc.truncated && static_cast<int>(sc.generations.size()) < p.maxGen) sc.truncated = true;
  return sc;
}

Scaffold build_generations(const MassGrid& grid, const ScheduleParams& p) {
  return build_generations(grid, p, dyadic_profile(grid));
}

ESetEstimate estimate_eset(const MassGrid& grid, double alpha, double tau, int settleLevel) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  require(tau >= 0.0, "tolerance must be nonnegative");
  const int K = grid.level();
  const int n = grid.dim();
  require(settleLevel >= 0 && settleLevel < K, "settle level must satisfy 0 <= L < K");
  ESetEstimate est;
  est.alpha = alpha;
  est.tau = tau;
  est.settleLevel = settleLevel;
  auto inband = [&](double d) { return d >= alpha - tau && d <= alpha + tau; };

  std::vector<std::uint8_t> flag;
  {
    const std::int64_t side = std::int64_t{1} << settleLevel;
    const std::int64_t rows = n == 2 ? side : 1;
    flag.assign(static_cast<std::size_t>(side * rows), 0);
    for (std::int64_t y = 0; y < rows; ++y)
      for (std::int64_t x = 0; x < side; ++x)
        flag[x + y * side] = inband(grid.cube_density(DyadicCube{n, settleLevel, Index2(x, y)}));
  }
  for (int L = settleLevel + 1; L <= K; ++L) {
    const std::int64_t side = std::int64_t{1} << L;
    const std::int64_t rows = n == 2 ? side : 1;
    std::vector<std::uint8_t> f(static_cast<std::size_t>(side * rows), 0);
    for (std::int64_t y = 0; y < rows; ++y)
      for (std::int64_t x = 0; x < side; ++x) {
        const std::size_t up = static_cast<std::size_t>((x >> 1) + (n == 2 ? (y >> 1) * (side >> 1) : 0));
        if (flag[up]) f[x + y * side] = inband(grid.cube_density(DyadicCube{n, L, Index2(x, y)}));
      }
    flag.swap(f);
  }
  for (std::size_t c = 0; c < flag.size(); ++c)
    if (flag[c]) est.members.push_back(c);
  est.volume = static_cast<double>(est.members.size()) * grid.cell_volume();

  est.counts.assign(static_cast<std::size_t>(K) + 1, 0);
  std::vector<std::uint8_t> occ = flag;
  for (int L = K;; --L) {
    std::uint64_t c = 0;
    for (auto v : occ) c += v;
    est.counts[L] = c;
    if (L == 0) break;
    const std::int64_t side = std::int64_t{1} << L;
    const std::int64_t half = side >> 1;
    std::vector<std::uint8_t> up(static_cast<std::size_t>(n == 2 ? half * half : half), 0);
    for (std::int64_t y = 0; y < (n == 2 ? side : 1); ++y)
      for (std::int64_t x = 0; x < side; ++x)
        if (occ[x + y * side]) up[(x >> 1) + (n == 2 ? (y >> 1) * half : 0)] = 1;
    occ.swap(up);
  }
  return est;
}

std::vector<BridgeRow> nondyadic_bridge_check(const MassGrid& grid, const Point& x, const std::vector<double>& scales,
                                              const ModulusProfile& omega) {
  const int n = grid.dim();
  std::vector<BridgeRow> rows;
  for (double h : scales) {
    require(h > 0.0 && h <= 1.0, "scale must lie in (0,1]");
    const AxisBox box = AxisBox::centered(x, h, n);
    require(box.inside_unit(), "Q(x,h) must lie in the unit cube");
    BridgeRow r;
    r.h = h;
    r.k = static_cast<int>(std::ceil(-std::log2(h)));
    while (std::ldexp(1.0, -r.k) > h) ++r.k;
    while (r.k > 0 && std::ldexp(1.0, -(r.k - 1)) <= h) --r.k;
    const DyadicCube qk = containing_cube(x, r.k, n);
    const double t = h * std::ldexp(1.0, r.k);
    r.gap = std::abs(grid.cube_density(box) - grid.cube_density(qk));
    r.cnt = lemma3b_constant(t, n);
    r.omega = omega.envelope_at(r.k - 1);
    r.bound = (3.0 * n * n + r.cnt) * r.omega;
    r.pass = r.gap <= r.bound + 1e-12;
    r.clipped = !AxisBox::from(qk).scaled(t).inside_unit();
    rows.push_back(r);
  }
  return rows;
}

std::string scaffold_json(const Scaffold& s) {
  using nlohmann::json;
  auto cube = [&](const CubeDensity& c) {
    json idx = json::array();
    for (int i = 0; i < s.dim; ++i) idx.push_back(c.cube.index[i]);
    return json{{"level", c.cube.level}, {"index", idx}, {"density", c.density}};
  };
  json gens = json::array();
  for (const auto& g : s.generations) {
    json arr = json::array();
    for (const auto& c : g) arr.push_back(cube(c));
    gens.push_back(arr);
  }
  json stats = json::array();
  for (const auto& st : s.stats)
    stats.push_back({{"generation", st.generation},
                     {"eps", st.eps},
                     {"omega", st.omega},
                     {"c", st.c},
                     {"parents", st.parents},
                     {"stopped", st.stopped},
                     {"members", st.members},
                     {"P", st.P},
                     {"C", st.Craw},
                     {"Cadjusted", st.Cadjusted},
                     {"undecided", st.undecided},
                     {"dimBound", st.dimBound},
                     {"dimBoundAdjusted", st.dimBoundAdjusted},
                     {"sandwichChecks", st.sandwichChecks},
                     {"sandwichViolations", st.sandwichViolations},
                     {"stopVolumeViolations", st.stopVolumeViolations},
                     {"memberVolumeViolations", st.memberVolumeViolations},
                     {"retainedViolations", st.retainedViolations},
                     {"postconditionViolations", st.postconditionViolations},
                     {"windowViolations", st.windowViolations},
                     {"sizeViolations", st.sizeViolations},
                     {"nestingViolations", st.nestingViolations}});
  json j{{"alpha", s.alpha},
         {"n", s.dim},
         {"k0", s.k0},
         {"k0ConditionMet", s.k0ConditionMet},
         {"epsConditionMet", s.epsConditionMet},
         {"c", s.c},
         {"eps", s.eps},
         {"omega", s.omega},
         {"seed", cube(s.seed)},
         {"generations", gens},
         {"perGenP", s.perGenP},
         {"perGenC", s.perGenC},
         {"perGenCAdjusted", s.perGenCAdjusted},
         {"dimBound", s.dimBound},
         {"undecided", s.undecided},
         {"truncated", s.truncated},
         {"flag", s.flag},
         {"stats", stats}};
  return j.dump(2);
}

}  // namespace smoothset
