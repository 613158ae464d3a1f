#include "codebound/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace codebound {

Endpoint Endpoint::approx(double x) {
  return Endpoint{rational_from_double(x, BigInt("1000000000000")), false};
}

double PiFrac::radians() const { return M_PI * static_cast<double>(num) / static_cast<double>(den); }

PiFrac PiFrac::of(long num, long den) {
  if (den == 0) throw std::invalid_argument("PiFrac: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long g = std::gcd(std::abs(num), den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return PiFrac{num, den};
}

PiFrac operator+(PiFrac a, PiFrac b) { return PiFrac::of(a.num * b.den + b.num * a.den, a.den * b.den); }
PiFrac operator-(PiFrac a, PiFrac b) { return PiFrac::of(a.num * b.den - b.num * a.den, a.den * b.den); }
bool operator<(PiFrac a, PiFrac b) { return a.num * b.den < b.num * a.den; }

Endpoint cos_of(PiFrac frac) {
  // exact rational cosines on [0, pi]
  if (frac.num == 0) return Endpoint::exact_value(Rational(1));
  if (frac.num == 1 && frac.den == 3) return Endpoint::exact_value(Rational(1, 2));
  if (frac.num == 1 && frac.den == 2) return Endpoint::exact_value(Rational(0));
  if (frac.num == 2 && frac.den == 3) return Endpoint::exact_value(Rational(-1, 2));
  if (frac.num == 1 && frac.den == 1) return Endpoint::exact_value(Rational(-1));
  return Endpoint::approx(std::cos(frac.radians()));
}

double bound_from_y(double y_star) {
  if (!(y_star > 0)) throw std::domain_error("bound_from_y: requires y > 0");
  return (1.0 + y_star) / y_star;
}

Rational bound_from_y_exact(const Rational& y_lower) {
  if (!(y_lower > 0)) throw std::domain_error("bound_from_y_exact: requires y > 0");
  return (1 + y_lower) / y_lower;
}

namespace {

// Affine expression over model variables, used to sketch block entries.
struct LinExpr {
  std::map<int, Rational> coef;
  Rational cst{0};

  static LinExpr constant(Rational c) { return LinExpr{{}, std::move(c)}; }
  static LinExpr var(int idx, Rational c = Rational(1)) {
    return LinExpr{{{idx, std::move(c)}}, Rational(0)};
  }

  LinExpr& operator+=(const LinExpr& o) {
    for (const auto& [i, c] : o.coef) coef[i] += c;
    cst += o.cst;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    for (const auto& [i, c] : o.coef) coef[i] -= c;
    cst -= o.cst;
    return *this;
  }
  friend LinExpr operator*(const Rational& s, LinExpr e) {
    for (auto& [i, c] : e.coef) c *= s;
    e.cst *= s;
    return e;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
};

struct BlockSketch {
  int n;
  std::map<std::pair<int, int>, LinExpr> entries;

  explicit BlockSketch(int size) : n(size) {}

  void set(int i, int j, LinExpr e) {
    if (i > j) std::swap(i, j);
    entries[{i, j}] = std::move(e);
  }

  AffineBlock finish() const {
    AffineBlock b;
    b.size = n;
    for (const auto& [pos, e] : entries) {
      if (e.cst != 0) b.constant.push_back({pos.first, pos.second, e.cst});
      for (const auto& [vi, c] : e.coef)
        if (c != 0) b.terms[vi].push_back({pos.first, pos.second, c});
    }
    return b;
  }
};

// H_m(a, b) of affine moment expressions s_0..s_{2m-1}: the blocks R_m,
// F_m^+(a), F_m^-(b).
void add_hankel(std::vector<AffineBlock>& out, const std::vector<LinExpr>& s, int m,
                const Rational& a, const Rational& b) {
  if (static_cast<int>(s.size()) < 2 * m) throw std::invalid_argument("add_hankel: need 2m moments");
  if (!(a < b)) throw std::invalid_argument("add_hankel: require a < b");
  BlockSketch R(m), Fp(m), Fm(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const LinExpr& sij = s[static_cast<size_t>(i + j)];
      const LinExpr& sij1 = s[static_cast<size_t>(i + j + 1)];
      R.set(i, j, sij);
      Fp.set(i, j, sij1 - a * sij);
      Fm.set(i, j, b * sij - sij1);
    }
  out.push_back(R.finish());
  out.push_back(Fp.finish());
  out.push_back(Fm.finish());
}

void check_family_interval(const ZonalFamily& family, const Endpoint& a, const Endpoint& b, int m,
                           const char* who) {
  std::ostringstream msg;
  msg << who << ": ";
  if (m < 1) {
    msg << "m must be >= 1";
    throw std::invalid_argument(msg.str());
  }
  if (family.k_max < 2 * m - 1) {
    msg << "family k_max " << family.k_max << " < 2m-1 = " << 2 * m - 1;
    throw std::invalid_argument(msg.str());
  }
  if (!(a.value < b.value)) {
    msg << "require a < b";
    throw std::invalid_argument(msg.str());
  }
  if (a.value < family.space.tau_min() || b.value > family.space.tau_max()) {
    msg << "[a,b] must lie inside the tau range";
    throw std::invalid_argument(msg.str());
  }
  const Rational t0 = family.space.tau0();
  if (a.value <= t0 && t0 <= b.value) {
    msg << "[a,b] must not contain tau0";
    throw std::invalid_argument(msg.str());
  }
}

std::string moment_name(int d) { return "x" + std::to_string(d); }

}  // namespace

SdpModel build_sdp0(const ZonalFamily& family, const Endpoint& a, const Endpoint& b, int m) {
  check_family_interval(family, a, b, m, "build_sdp0");
  const int K = 2 * m - 1;

  std::vector<std::string> names = {"y"};
  for (int d = 1; d <= K; ++d) names.push_back(moment_name(d));
  std::vector<Rational> obj(names.size(), Rational(0));
  obj[0] = 1;

  // normalized moments: sbar_0 = 1, sbar_d = x_d
  std::vector<LinExpr> mom;
  mom.push_back(LinExpr::constant(Rational(1)));
  for (int d = 1; d <= K; ++d) mom.push_back(LinExpr::var(d));

  std::vector<AffineBlock> blocks;
  for (int k = 1; k <= K; ++k) {
    LinExpr e = LinExpr::var(0);  // y
    for (int d = 0; d <= k; ++d)
      e += family.coeffs[static_cast<size_t>(k)][static_cast<size_t>(d)] *
           mom[static_cast<size_t>(d)];
    BlockSketch s(1);
    s.set(0, 0, std::move(e));
    blocks.push_back(s.finish());
  }
  add_hankel(blocks, mom, m, a.value, b.value);

  SdpModel model = assemble(std::move(names), Sense::Min, std::move(obj), std::move(blocks));
  model.formulation = "sdp0";
  model.bound_rule = BoundRule::MinYReciprocal;
  model.exact_data = a.exact && b.exact;
  return model;
}

SdpModel build_sdp0_antipodal(const ZonalFamily& family, const Endpoint& a, const Endpoint& b,
                              int m) {
  check_family_interval(family, a, b, m, "build_sdp0_antipodal");
  if (family.space.kind != SpaceKind::Sphere)
    throw std::invalid_argument("build_sdp0_antipodal: sphere space required");
  if (a.value != Rational(-1))
    throw std::invalid_argument("build_sdp0_antipodal: requires -1 in [a,b]");
  const int K = 2 * m - 1;

  std::vector<std::string> names = {"y"};
  for (int d = 2; d <= 2 * m - 2; d += 2) names.push_back(moment_name(d));
  std::vector<Rational> obj(names.size(), Rational(0));
  obj[0] = 1;
  auto even_index = [](int d) { return d / 2; };  // x_2 -> 1, x_4 -> 2, ...

  // antipodal: every odd moment equals -y
  std::vector<LinExpr> mom;
  mom.push_back(LinExpr::constant(Rational(1)));
  for (int d = 1; d <= K; ++d)
    mom.push_back(d % 2 == 1 ? LinExpr::var(0, Rational(-1)) : LinExpr::var(even_index(d)));

  std::vector<AffineBlock> blocks;
  for (int k = 1; k <= K; ++k) {
    LinExpr e = LinExpr::var(0);
    for (int d = 0; d <= k; ++d)
      e += family.coeffs[static_cast<size_t>(k)][static_cast<size_t>(d)] *
           mom[static_cast<size_t>(d)];
    BlockSketch s(1);
    s.set(0, 0, std::move(e));
    blocks.push_back(s.finish());
  }
  add_hankel(blocks, mom, m, a.value, b.value);

  SdpModel model = assemble(std::move(names), Sense::Min, std::move(obj), std::move(blocks));
  model.formulation = "sdp0_antipodal";
  model.bound_rule = BoundRule::MinYReciprocal;
  model.exact_data = a.exact && b.exact;
  return model;
}

std::vector<double> cap_thresholds(double theta, int k_max) {
  if (!(theta > 0 && theta < M_PI)) throw std::invalid_argument("cap_thresholds: theta in (0, pi)");
  if (k_max < 1) throw std::invalid_argument("cap_thresholds: k_max >= 1");
  const double ct = std::cos(theta);
  std::vector<double> out;
  for (int k = 1; k <= k_max; ++k) out.push_back(std::sqrt(ct + (1.0 - ct) / (k + 1)));
  return out;
}

AdConstraint AdConstraint::pfender(double theta) {
  AdConstraint ad;
  ad.kind = Kind::Pfender;
  ad.theta = theta;
  return ad;
}

AdConstraint AdConstraint::cap_count(double theta, int k) {
  AdConstraint ad;
  ad.kind = Kind::CapCount;
  ad.theta = theta;
  ad.k = k;
  return ad;
}

AdConstraint AdConstraint::linear(std::map<std::string, Rational> coeffs, Rational constant) {
  AdConstraint ad;
  ad.kind = Kind::LinearCustom;
  ad.coeffs = std::move(coeffs);
  ad.constant = std::move(constant);
  return ad;
}

namespace {

std::string interval_var(int i, int k) {  // 1-based interval
  return "x" + std::to_string(i) + "_" + std::to_string(k);
}
std::string anchor_var(int i, int k) {  // 1-based anchor
  return "y" + std::to_string(i) + "_" + std::to_string(k);
}

// Index of the breakpoint matching value u, or -1.
int match_breakpoint(const std::vector<Endpoint>& bps, double u) {
  for (size_t j = 0; j < bps.size(); ++j)
    if (std::abs(bps[j].f() - u) <= 1e-9 * (1.0 + std::abs(u))) return static_cast<int>(j);
  return -1;
}

struct SdpaLayout {
  int ell = 0;
  int m = 0;
  int c_idx = 0;
  int z_idx = 1;
  int x_base = 2;  // x{i}_{k} at x_base + (i-1)*2m + k

  int x(int i, int k) const { return x_base + (i - 1) * 2 * m + k; }
};

// Renders one Ad descriptor into size-1 blocks appended to `blocks`.
void render_ad(const AdConstraint& ad, const SdpaLayout& lay, const std::vector<Endpoint>& bps,
               const std::vector<std::string>& names, std::vector<AffineBlock>& blocks,
               bool& exact) {
  switch (ad.kind) {
    case AdConstraint::Kind::Pfender: {
      const double ct = std::cos(ad.theta);
      const Endpoint cte = Endpoint::approx(ct);
      const int j = match_breakpoint(bps, -std::sqrt(ct));
      if (j < 0)
        throw std::invalid_argument("pfender constraint: -sqrt(cos theta) is not a breakpoint");
      // over the intervals below the breakpoint:
      //   cos(theta) x^{(0)} + (1 - cos(theta)) c - x^{(2)} >= 0
      LinExpr e = LinExpr::var(lay.c_idx, Rational(1) - cte.value);
      for (int i = 1; i <= j; ++i) {
        e += LinExpr::var(lay.x(i, 0), cte.value);
        e -= LinExpr::var(lay.x(i, 2));
      }
      BlockSketch s(1);
      s.set(0, 0, std::move(e));
      blocks.push_back(s.finish());
      exact = false;
      break;
    }
    case AdConstraint::Kind::CapCount: {
      const double tk = cap_thresholds(ad.theta, ad.k)[static_cast<size_t>(ad.k - 1)];
      const int j = match_breakpoint(bps, -tk);
      if (j < 0) throw std::invalid_argument("cap constraint: -t_k is not a breakpoint");
      // s_0(C, [a, -t_k)) <= k c
      LinExpr e = LinExpr::var(lay.c_idx, Rational(ad.k));
      for (int i = 1; i <= j; ++i) e -= LinExpr::var(lay.x(i, 0));
      BlockSketch s(1);
      s.set(0, 0, std::move(e));
      blocks.push_back(s.finish());
      exact = false;
      break;
    }
    case AdConstraint::Kind::LinearCustom: {
      LinExpr e = LinExpr::constant(ad.constant);
      for (const auto& [name, coef] : ad.coeffs) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
          throw std::invalid_argument("linear ad constraint references unknown variable " + name);
        e += LinExpr::var(static_cast<int>(it - names.begin()), coef);
      }
      BlockSketch s(1);
      s.set(0, 0, std::move(e));
      blocks.push_back(s.finish());
      break;
    }
  }
}

}  // namespace

SdpModel build_sdpa(const ZonalFamily& family, const std::vector<Endpoint>& breakpoints,
                    const std::vector<AdConstraint>& ad, int m) {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("build_sdpa: need at least two breakpoints");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i].value < breakpoints[i + 1].value))
      throw std::invalid_argument("build_sdpa: breakpoints must be strictly increasing");
  const Endpoint& a = breakpoints.front();
  const Endpoint& b = breakpoints.back();
  check_family_interval(family, a, b, m, "build_sdpa");
  const int ell = static_cast<int>(breakpoints.size()) - 1;
  const int K = 2 * m - 1;

  SdpaLayout lay{ell, m, 0, 1, 2};
  std::vector<std::string> names = {"c", "z"};
  for (int i = 1; i <= ell; ++i)
    for (int k = 0; k <= K; ++k) names.push_back(interval_var(i, k));
  std::vector<Rational> obj(names.size(), Rational(0));
  obj[0] = 1;

  std::vector<AffineBlock> blocks;
  bool exact = true;
  for (const auto& bp : breakpoints) exact = exact && bp.exact;

  // (5): [[1, c], [c, z]] >= 0
  {
    BlockSketch s(2);
    s.set(0, 0, LinExpr::constant(Rational(1)));
    s.set(0, 1, LinExpr::var(lay.c_idx));
    s.set(1, 1, LinExpr::var(lay.z_idx));
    blocks.push_back(s.finish());
  }
  // (6): c + sum_d p_{kd} sum_i x_i^{(d)} >= 0, k = 1..2m-1
  for (int k = 1; k <= K; ++k) {
    LinExpr e = LinExpr::var(lay.c_idx);
    for (int d = 0; d <= k; ++d) {
      const Rational& p = family.coeffs[static_cast<size_t>(k)][static_cast<size_t>(d)];
      if (p == 0) continue;
      for (int i = 1; i <= ell; ++i) e += LinExpr::var(lay.x(i, d), p);
    }
    BlockSketch s(1);
    s.set(0, 0, std::move(e));
    blocks.push_back(s.finish());
  }
  // (7): per-interval Hankel blocks on the closed hull of [u_i, u_{i+1})
  for (int i = 1; i <= ell; ++i) {
    std::vector<LinExpr> mom;
    for (int k = 0; k <= K; ++k) mom.push_back(LinExpr::var(lay.x(i, k)));
    add_hankel(blocks, mom, m, breakpoints[static_cast<size_t>(i - 1)].value,
               breakpoints[static_cast<size_t>(i)].value);
  }
  // (8): Ad constraints
  for (const auto& c : ad) render_ad(c, lay, breakpoints, names, blocks, exact);

  // z = c + sum_i x_i^{(0)}
  Equality eq;
  eq.coeffs[lay.z_idx] = 1;
  eq.coeffs[lay.c_idx] = -1;
  for (int i = 1; i <= ell; ++i) eq.coeffs[lay.x(i, 0)] = -1;
  eq.rhs = 0;

  SdpModel model =
      assemble(std::move(names), Sense::Max, std::move(obj), std::move(blocks), {std::move(eq)});
  model.formulation = "sdpa";
  model.bound_rule = BoundRule::MaxC;
  model.exact_data = exact;
  return model;
}

SdpModel build_sdpa_subset(const ZonalFamily& family, const Endpoint& a, const Endpoint& b,
                           const AnchorSpec& anchors, const std::vector<AdConstraint>& ad, int m) {
  const int r = anchors.tau.n;
  SdpModel model = build_sdpa(family, {a, b}, ad, m);
  if (r == 0) return model;  // no anchors: plain SDPA
  if (static_cast<int>(anchors.intervals.size()) != r)
    throw std::invalid_argument("build_sdpa_subset: one [alpha, beta] window per anchor required");
  for (int i = 0; i < r; ++i)
    if (anchors.tau.at(i, i) != family.space.tau0())
      throw std::invalid_argument("build_sdpa_subset: anchor tau diagonal must equal tau0");

  const int K = 2 * m - 1;
  SdpaLayout lay{1, m, 0, 1, 2};

  std::vector<std::string> names = model.variables;
  const int y_base = static_cast<int>(names.size());
  auto yvar = [&](int i, int k) { return y_base + (i - 1) * 2 * m + k; };
  for (int i = 1; i <= r; ++i)
    for (int k = 0; k <= K; ++k) names.push_back(anchor_var(i, k));
  std::vector<Rational> obj = model.objective;
  obj.resize(names.size(), Rational(0));

  std::vector<AffineBlock> blocks = model.blocks;
  bool exact = model.exact_data && anchors.tau_exact;

  // (9): G_k = (F_k(X_i, X_j)) over {q_1}, .., {q_r}, C
  for (int k = 0; k <= K; ++k) {
    BlockSketch s(r + 1);
    for (int i = 0; i < r; ++i)
      for (int j = i; j < r; ++j)
        s.set(i, j, LinExpr::constant(family.eval_exact(k, anchors.tau.at(i, j))));
    for (int i = 0; i < r; ++i) {
      LinExpr e;
      for (int d = 0; d <= k; ++d)
        e += family.coeffs[static_cast<size_t>(k)][static_cast<size_t>(d)] *
             LinExpr::var(yvar(i + 1, d));
      s.set(i, r, std::move(e));
    }
    LinExpr code = LinExpr::var(lay.c_idx);
    for (int d = 0; d <= k; ++d)
      code += family.coeffs[static_cast<size_t>(k)][static_cast<size_t>(d)] *
              LinExpr::var(lay.x(1, d));
    s.set(r, r, std::move(code));
    blocks.push_back(s.finish());
  }
  // (10): anchor-moment Hankel blocks on [alpha_i, beta_i]
  for (int i = 1; i <= r; ++i) {
    const auto& [alpha, beta] = anchors.intervals[static_cast<size_t>(i - 1)];
    exact = exact && alpha.exact && beta.exact;
    std::vector<LinExpr> mom;
    for (int k = 0; k <= K; ++k) mom.push_back(LinExpr::var(yvar(i, k)));
    add_hankel(blocks, mom, m, alpha.value, beta.value);
  }
  // y_i^{(0)} = c
  std::vector<Equality> eqs = model.equalities;
  for (int i = 1; i <= r; ++i) {
    Equality eq;
    eq.coeffs[yvar(i, 0)] = 1;
    eq.coeffs[lay.c_idx] = -1;
    eq.rhs = 0;
    eqs.push_back(std::move(eq));
  }

  SdpModel out =
      assemble(std::move(names), Sense::Max, std::move(obj), std::move(blocks), std::move(eqs));
  out.formulation = "sdpa_subset";
  out.bound_rule = BoundRule::MaxC;
  out.exact_data = exact;
  return out;
}

PairInterval cell_pair_interval(const Cell& ci, const Cell& cj, const Endpoint& a,
                                const Endpoint& b, bool same_cell) {
  PairInterval out;
  if (same_cell) {
    PiFrac two_hi = ci.theta_hi + ci.theta_hi;
    if (PiFrac::of(1, 1) < two_hi) two_hi = PiFrac::of(1, 1);
    const Endpoint lo_cos = cos_of(two_hi);
    out.lo = lo_cos.value > a.value ? lo_cos : a;
    out.hi = b;
  } else {
    PiFrac tmin = PiFrac::of(0, 1);
    if (tmin < ci.theta_lo - cj.theta_hi) tmin = ci.theta_lo - cj.theta_hi;
    if (tmin < cj.theta_lo - ci.theta_hi) tmin = cj.theta_lo - ci.theta_hi;
    PiFrac tmax = ci.theta_hi + cj.theta_hi;
    if (PiFrac::of(1, 1) < tmax) tmax = PiFrac::of(1, 1);
    const Endpoint lo_cos = cos_of(tmax);
    const Endpoint hi_cos = cos_of(tmin);
    out.lo = lo_cos.value > a.value ? lo_cos : a;
    out.hi = hi_cos.value < b.value ? hi_cos : b;
  }
  out.empty = out.lo.value > out.hi.value;
  return out;
}

PartitionSpec one_sided_partition(int n) {
  if (n < 3) throw std::invalid_argument("one_sided_partition: n >= 3");
  PartitionSpec p;
  p.anchor_tau = RatMatrix(1);
  p.anchor_tau.at(0, 0) = Rational(1);
  p.anchor_tau_exact = true;

  const PiFrac zero = PiFrac::of(0, 1);
  const PiFrac quarter = PiFrac::of(1, 4);
  const PiFrac two_fifth = PiFrac::of(2, 5);
  const PiFrac half = PiFrac::of(1, 2);

  auto make_cell = [](PiFrac lo, PiFrac hi) {
    Cell c;
    c.theta_lo = lo;
    c.theta_hi = hi;
    c.anchor_tau = {{cos_of(hi), cos_of(lo)}};
    return c;
  };
  p.cells = {make_cell(zero, quarter), make_cell(quarter, two_fifth), make_cell(two_fifth, half)};

  const Endpoint a = Endpoint::exact_value(Rational(-1));
  const Endpoint b = Endpoint::exact_value(Rational(1, 2));
  const int d = static_cast<int>(p.cells.size());
  p.pair_intervals.assign(static_cast<size_t>(d),
                          std::vector<PairInterval>(static_cast<size_t>(d)));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const PairInterval pi = cell_pair_interval(p.cells[static_cast<size_t>(i)],
                                                 p.cells[static_cast<size_t>(j)], a, b, i == j);
      p.pair_intervals[static_cast<size_t>(i)][static_cast<size_t>(j)] = pi;
      p.pair_intervals[static_cast<size_t>(j)][static_cast<size_t>(i)] = pi;
    }
  return p;
}

SdpModel build_sdphat(const ZonalFamily& family, const Endpoint& a, const Endpoint& b,
                      PartitionSpec partition, const std::vector<AdConstraint>& ad, int m) {
  check_family_interval(family, a, b, m, "build_sdphat");
  const int r = partition.anchor_tau.n;
  const int d = static_cast<int>(partition.cells.size());
  if (d < 1) throw std::invalid_argument("build_sdphat: need at least one cell");
  for (const auto& cell : partition.cells)
    if (static_cast<int>(cell.anchor_tau.size()) != r)
      throw std::invalid_argument("build_sdphat: every cell needs one anchor window per anchor");
  for (int i = 0; i < r; ++i)
    if (partition.anchor_tau.at(i, i) != family.space.tau0())
      throw std::invalid_argument("build_sdphat: anchor tau diagonal must equal tau0");
  if (partition.pair_intervals.empty()) {
    partition.pair_intervals.assign(static_cast<size_t>(d),
                                    std::vector<PairInterval>(static_cast<size_t>(d)));
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const PairInterval pi = cell_pair_interval(partition.cells[static_cast<size_t>(i)],
                                                   partition.cells[static_cast<size_t>(j)], a, b,
                                                   i == j);
        partition.pair_intervals[static_cast<size_t>(i)][static_cast<size_t>(j)] = pi;
        partition.pair_intervals[static_cast<size_t>(j)][static_cast<size_t>(i)] = pi;
      }
  }
  const int K = 2 * m - 1;

  // variables: c_j, then x_{ij}^{(k)} for i <= j, then y_{ij}^{(k)}
  std::vector<std::string> names;
  for (int j = 1; j <= d; ++j) names.push_back("c" + std::to_string(j));
  std::vector<std::vector<int>> xbase(static_cast<size_t>(d) + 1,
                                      std::vector<int>(static_cast<size_t>(d) + 1, -1));
  for (int i = 1; i <= d; ++i)
    for (int j = i; j <= d; ++j) {
      xbase[static_cast<size_t>(i)][static_cast<size_t>(j)] = static_cast<int>(names.size());
      for (int k = 0; k <= K; ++k)
        names.push_back("x" + std::to_string(i) + std::to_string(j) + "_" + std::to_string(k));
    }
  std::vector<std::vector<int>> ybase(static_cast<size_t>(r) + 1,
                                      std::vector<int>(static_cast<size_t>(d) + 1, -1));
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= d; ++j) {
      ybase[static_cast<size_t>(i)][static_cast<size_t>(j)] = static_cast<int>(names.size());
      for (int k = 0; k <= K; ++k)
        names.push_back("y" + std::to_string(i) + std::to_string(j) + "_" + std::to_string(k));
    }
  auto xvar = [&](int i, int j, int k) {
    if (i > j) std::swap(i, j);
    return xbase[static_cast<size_t>(i)][static_cast<size_t>(j)] + k;
  };
  auto yvar = [&](int i, int j, int k) {
    return ybase[static_cast<size_t>(i)][static_cast<size_t>(j)] + k;
  };

  std::vector<Rational> obj(names.size(), Rational(0));
  for (int j = 0; j < d; ++j) obj[static_cast<size_t>(j)] = 1;  // maximize c_1 + .. + c_d

  std::vector<AffineBlock> blocks;
  std::vector<Equality> eqs;
  bool exact = a.exact && b.exact && partition.anchor_tau_exact;

  // (11): Gamma_k over {q_1..q_r, C_1..C_d}
  for (int k = 0; k <= K; ++k) {
    BlockSketch s(r + d);
    for (int i = 0; i < r; ++i)
      for (int j = i; j < r; ++j)
        s.set(i, j, LinExpr::constant(family.eval_exact(k, partition.anchor_tau.at(i, j))));
    for (int i = 1; i <= r; ++i)
      for (int j = 1; j <= d; ++j) {
        LinExpr e;
        for (int dd = 0; dd <= k; ++dd)
          e += family.coeffs[static_cast<size_t>(k)][static_cast<size_t>(dd)] *
               LinExpr::var(yvar(i, j, dd));
        s.set(i - 1, r + j - 1, std::move(e));
      }
    for (int i = 1; i <= d; ++i)
      for (int j = i; j <= d; ++j) {
        LinExpr e;
        for (int dd = 0; dd <= k; ++dd)
          e += family.coeffs[static_cast<size_t>(k)][static_cast<size_t>(dd)] *
               LinExpr::var(xvar(i, j, dd));
        s.set(r + i - 1, r + j - 1, std::move(e));
      }
    blocks.push_back(s.finish());
  }

  // (13): anchor-cell moment Hankel blocks on [alpha_ij, beta_ij]
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= d; ++j) {
      const auto& [alpha, beta] =
          partition.cells[static_cast<size_t>(j - 1)].anchor_tau[static_cast<size_t>(i - 1)];
      if (!(alpha.value < beta.value))
        throw std::invalid_argument("build_sdphat: inconsistent anchor window");
      exact = exact && alpha.exact && beta.exact;
      std::vector<LinExpr> mom;
      for (int k = 0; k <= K; ++k) mom.push_back(LinExpr::var(yvar(i, j, k)));
      add_hankel(blocks, mom, m, alpha.value, beta.value);
    }

  // (14): cross-cell Hankels; empty pair windows pin the variables to zero
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      const PairInterval& w =
          partition.pair_intervals[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
      if (w.empty) {
        for (int k = 0; k <= K; ++k) {
          Equality zero;
          zero.coeffs[xvar(i, j, k)] = 1;
          zero.rhs = 0;
          eqs.push_back(std::move(zero));
        }
        continue;
      }
      exact = exact && w.lo.exact && w.hi.exact;
      std::vector<LinExpr> mom;
      for (int k = 0; k <= K; ++k) mom.push_back(LinExpr::var(xvar(i, j, k)));
      add_hankel(blocks, mom, m, w.lo.value, w.hi.value);
    }

  // (15): within-cell Hankels after removing the c_i diagonal pairs
  const Rational tau0 = family.space.tau0();
  for (int i = 1; i <= d; ++i) {
    const PairInterval& w =
        partition.pair_intervals[static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)];
    if (w.empty) throw std::invalid_argument("build_sdphat: empty same-cell pair window");
    exact = exact && w.lo.exact && w.hi.exact;
    std::vector<LinExpr> mom;
    Rational t0k(1);
    for (int k = 0; k <= K; ++k) {
      mom.push_back(LinExpr::var(xvar(i, i, k)) - t0k * LinExpr::var(i - 1));
      t0k *= tau0;
    }
    add_hankel(blocks, mom, m, w.lo.value, w.hi.value);
  }

  // (17): moment matrix [[1, c], [c, h]] with h_ij = x_{ij}^{(0)}
  {
    BlockSketch s(d + 1);
    s.set(0, 0, LinExpr::constant(Rational(1)));
    for (int j = 1; j <= d; ++j) s.set(0, j, LinExpr::var(j - 1));
    for (int i = 1; i <= d; ++i)
      for (int j = i; j <= d; ++j) s.set(i, j, LinExpr::var(xvar(i, j, 0)));
    blocks.push_back(s.finish());
  }
  // c_j >= 0
  for (int j = 0; j < d; ++j) {
    BlockSketch s(1);
    s.set(0, 0, LinExpr::var(j));
    blocks.push_back(s.finish());
  }
  // (16): Ad constraints (linear form only in this formulation)
  for (const auto& c : ad) {
    if (c.kind != AdConstraint::Kind::LinearCustom)
      throw std::invalid_argument("build_sdphat: only linear ad constraints are supported here");
    LinExpr e = LinExpr::constant(c.constant);
    for (const auto& [name, coef] : c.coeffs) {
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end())
        throw std::invalid_argument("linear ad constraint references unknown variable " + name);
      e += LinExpr::var(static_cast<int>(it - names.begin()), coef);
    }
    BlockSketch s(1);
    s.set(0, 0, std::move(e));
    blocks.push_back(s.finish());
  }
  // (12): y_{ij}^{(0)} = c_j
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= d; ++j) {
      Equality eq;
      eq.coeffs[yvar(i, j, 0)] = 1;
      eq.coeffs[j - 1] = -1;
      eq.rhs = 0;
      eqs.push_back(std::move(eq));
    }

  SdpModel model =
      assemble(std::move(names), Sense::Max, std::move(obj), std::move(blocks), std::move(eqs));
  model.formulation = "sdphat";
  model.bound_rule = BoundRule::MaxC;
  model.exact_data = exact;
  return model;
}

namespace {

// Real roots of the derivative of a monomial-basis polynomial, via the
// companion matrix.
std::vector<double> critical_points(const std::vector<double>& mono, double a, double b) {
  std::vector<double> deriv;
  for (size_t dd = 1; dd < mono.size(); ++dd) deriv.push_back(static_cast<double>(dd) * mono[dd]);
  while (!deriv.empty() && std::abs(deriv.back()) < 1e-300) deriv.pop_back();
  std::vector<double> out;
  const int deg = static_cast<int>(deriv.size()) - 1;
  if (deg < 1) return out;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -deriv[static_cast<size_t>(i)] / deriv.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  for (int i = 0; i < deg; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z.real())) && z.real() >= a && z.real() <= b)
      out.push_back(z.real());
  }
  return out;
}

double eval_mono(const std::vector<double>& mono, double t) {
  double acc = 0.0;
  for (size_t dd = mono.size(); dd-- > 0;) acc = acc * t + mono[dd];
  return acc;
}

}  // namespace

BoundReport lp_dual_bound(const ZonalFamily& family, const Endpoint& a, const Endpoint& b, int N,
                          int grid_points, const SolverSettings* settings) {
  if (N < 1 || N > family.k_max)
    throw std::invalid_argument("lp_dual_bound: need 1 <= N <= family.k_max");
  if (grid_points < 2) throw std::invalid_argument("lp_dual_bound: need at least two grid points");
  if (!(a.value < b.value)) throw std::invalid_argument("lp_dual_bound: require a < b");

  // Exact rational grid: equidistant points for the sphere, the integer tau
  // values for Hamming (the whole of S, so no continuous check is needed).
  std::vector<Rational> grid;
  if (family.space.kind == SpaceKind::Sphere) {
    const Rational span = b.value - a.value;
    for (int g = 0; g < grid_points; ++g)
      grid.push_back(a.value + span * Rational(g, grid_points - 1));
  } else {
    const BigInt lo_num = numerator(a.value), lo_den = denominator(a.value);
    BigInt t = lo_num / lo_den;
    while (Rational(t) < a.value) t += 1;
    for (; Rational(t) <= b.value; t += 1) grid.push_back(Rational(t));
  }

  std::vector<std::string> names;
  for (int k = 1; k <= N; ++k) names.push_back("f" + std::to_string(k));
  std::vector<Rational> obj(names.size(), Rational(1));

  std::vector<AffineBlock> blocks;
  for (int k = 0; k < N; ++k) {
    BlockSketch s(1);
    s.set(0, 0, LinExpr::var(k));
    blocks.push_back(s.finish());
  }
  for (const Rational& t : grid) {
    LinExpr e = LinExpr::constant(Rational(-1));
    for (int k = 1; k <= N; ++k) e -= family.eval_exact(k, t) * LinExpr::var(k - 1);
    BlockSketch s(1);
    s.set(0, 0, std::move(e));
    blocks.push_back(s.finish());
  }

  SdpModel model = assemble(std::move(names), Sense::Min, std::move(obj), std::move(blocks));
  model.formulation = "lp_dual";
  model.exact_data = a.exact && b.exact;

  SolverSettings st = settings ? *settings : SolverSettings{};
  st.max_total_dim = std::max(st.max_total_dim, model.total_block_dim() + 8);
  const SolveResult res = solve(model, st);

  BoundReport report;
  report.formulation = "lp_dual";
  report.m = N;
  report.status = res.status;
  report.objective = res.objective;
  report.duality_gap = res.duality_gap;
  for (size_t i = 0; i < model.variables.size(); ++i)
    report.variables[model.variables[i]] = res.x[i];
  report.bound_valid = res.status == SolveStatus::Optimal ||
                       (res.status == SolveStatus::NumericalLimit && res.duality_gap <= 1e-5);
  double bound = 1.0 + res.objective;

  if (family.space.kind == SpaceKind::Sphere && report.bound_valid) {
    // Continuous validity: check f between grid points; a positive excursion
    // v is absorbed by trading v of f_0, which weakens the bound to
    // (f(tau0) - v) / (1 - v).
    std::vector<double> f(static_cast<size_t>(N) + 1, 0.0);
    f[0] = 1.0;
    for (int k = 1; k <= N; ++k) f[static_cast<size_t>(k)] = res.x[static_cast<size_t>(k - 1)];
    const std::vector<double> mono = family.combine(f);
    double v = std::max(eval_mono(mono, a.f()), eval_mono(mono, b.f()));
    for (double t : critical_points(mono, a.f(), b.f())) v = std::max(v, eval_mono(mono, t));
    if (v > 0) {
      if (v >= 1.0) {
        report.bound_valid = false;
        report.notes = "grid solution invalid between grid points (violation >= 1)";
      } else {
        bound = (bound - v) / (1.0 - v);
        std::ostringstream note;
        note << "continuous check: violation " << v << " absorbed into the bound";
        report.notes = note.str();
      }
    }
  }
  report.bound = bound;
  return report;
}

double lp_polynomial_bound(const ZonalFamily& family, const std::vector<double>& f, double a,
                           double b) {
  if (f.empty() || static_cast<int>(f.size()) - 1 > family.k_max)
    throw std::invalid_argument("lp_polynomial_bound: coefficient count exceeds family degree");
  if (!(f[0] > 0)) throw std::invalid_argument("lp_polynomial_bound: f_0 must be positive");
  double scale = 0.0;
  for (size_t k = 1; k < f.size(); ++k) {
    if (f[k] < -1e-12) throw std::invalid_argument("lp_polynomial_bound: f_k must be nonnegative");
    scale += std::abs(f[k]);
  }
  const double tol = 1e-9 * (1.0 + scale);

  auto fail = [&](double t, double val) {
    std::ostringstream msg;
    msg << "lp_polynomial_bound: f(" << t << ") = " << val << " > 0 on [a,b]";
    throw std::runtime_error(msg.str());
  };

  if (family.space.kind == SpaceKind::Sphere) {
    const std::vector<double> mono = family.combine(f);
    double worst_t = a, worst = eval_mono(mono, a);
    if (a < b) {
      const double fb = eval_mono(mono, b);
      if (fb > worst) {
        worst = fb;
        worst_t = b;
      }
      for (double t : critical_points(mono, a, b)) {
        const double ft = eval_mono(mono, t);
        if (ft > worst) {
          worst = ft;
          worst_t = t;
        }
      }
    }
    if (worst > tol) fail(worst_t, worst);
  } else {
    for (int t = static_cast<int>(std::ceil(a)); t <= static_cast<int>(std::floor(b)); ++t) {
      double val = 0.0;
      for (size_t k = 0; k < f.size(); ++k) val += f[k] * family.eval(static_cast<int>(k), t);
      if (val > tol) fail(t, val);
    }
  }

  // Phi_k(tau0) = 1, so f(tau0) = sum f_k.
  double ftau0 = 0.0;
  for (double fk : f) ftau0 += fk;
  return ftau0 / f[0];
}

BoundReport solve_to_bound(const SdpModel& model, const SolverSettings* settings,
                           SolveResult* result_out) {
  SolverSettings st = settings ? *settings : SolverSettings{};
  st.max_total_dim =
      std::max(st.max_total_dim,
               model.total_block_dim() + 2 * static_cast<int>(model.equalities.size()) + 8);
  const SolveResult res = solve(model, st);
  if (result_out) *result_out = res;

  BoundReport report;
  report.formulation = model.formulation;
  report.status = res.status;
  report.objective = res.objective;
  report.duality_gap = res.duality_gap;
  for (size_t i = 0; i < model.variables.size(); ++i)
    report.variables[model.variables[i]] = res.x[i];

  const bool usable = res.status == SolveStatus::Optimal ||
                      (res.status == SolveStatus::NumericalLimit && res.duality_gap <= 1e-5);
  if (!usable) {
    report.notes = "solve did not reach a usable optimum";
    return report;
  }
  switch (model.bound_rule) {
    case BoundRule::MinYReciprocal:
      if (res.objective <= 0) {
        report.notes = "optimal y is nonpositive; bound undefined";
        return report;
      }
      report.bound = bound_from_y(res.objective);
      break;
    case BoundRule::MaxC:
    case BoundRule::None:
      report.bound = res.objective;
      break;
  }
  report.bound_valid = true;
  if (res.status == SolveStatus::NumericalLimit) report.notes = "best iterate (numerical limit)";
  return report;
}

}  // namespace codebound
