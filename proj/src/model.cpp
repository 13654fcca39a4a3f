#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace rosenbench {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) raise(ErrorCode::InvalidArgument, what);
}

bool all_finite(ConstVecRef x) {
  return x.allFinite();
}

// Numeric parameters may arrive as JSON numbers or as decimal strings
// ("0.05"), so exact decimal inputs survive config files.
double number_value(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t pos = 0;
      const std::string s = v.get<std::string>();
      const double d = std::stod(s, &pos);
      if (pos == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  raise(ErrorCode::Parse, what + " is not a number");
}

double as_number(const json& j, const std::string& key) {
  if (!j.contains(key)) raise(ErrorCode::Parse, "missing field '" + key + "'");
  return number_value(j.at(key), "field '" + key + "'");
}

int as_int(const json& j, const std::string& key) {
  const double d = as_number(j, key);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    raise(ErrorCode::Parse, "field '" + key + "' is not an integer");
  return i;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::TwoD: return "twod";
    case Family::Full: return "full";
    case Family::Even: return "even";
    case Family::Hybrid: return "hybrid";
  }
  return "?";
}

HybridParams HybridParams::uniform(int n1, int n2, double mu, double a, double b) {
  HybridParams p;
  p.mu = mu;
  p.a = a;
  p.n1 = n1;
  p.n2 = n2;
  if (n1 >= 2 && n2 >= 1) p.b = Eigen::MatrixXd::Constant(n2, n1 - 1, b);
  return p;
}

Model Model::twod(const TwoDParams& p) {
  require(std::isfinite(p.mu) && std::isfinite(p.a) && std::isfinite(p.b),
          "twod: parameters must be finite");
  require(p.a > 0 && p.b > 0, "twod: a and b must be positive");
  Model m;
  m.family_ = Family::TwoD;
  m.params_ = p;
  m.dim_ = 2;
  m.compile_terms();
  return m;
}

Model Model::full(const FullParams& p) {
  require(p.n >= 2, "full: n must be >= 2");
  require(std::isfinite(p.scale) && std::isfinite(p.quad_coeff) && std::isfinite(p.mu),
          "full: parameters must be finite");
  require(p.scale > 0 && p.quad_coeff > 0, "full: scale and quad_coeff must be positive");
  Model m;
  m.family_ = Family::Full;
  m.params_ = p;
  m.dim_ = p.n;
  m.compile_terms();
  return m;
}

Model Model::even(const EvenParams& p) {
  require(p.n >= 2 && p.n % 2 == 0, "even: n must be an even integer >= 2");
  require(p.mus.size() == static_cast<std::size_t>(p.n / 2),
          "even: mus must have length n/2");
  require(p.scale > 0 && p.quad_coeff > 0, "even: scale and quad_coeff must be positive");
  for (double mu : p.mus)
    require(std::isfinite(mu), "even: mus must be finite");
  Model m;
  m.family_ = Family::Even;
  m.params_ = p;
  m.dim_ = p.n;
  m.compile_terms();
  return m;
}

Model Model::hybrid(const HybridParams& p) {
  require(p.n1 >= 2, "hybrid: n1 must be >= 2");
  require(p.n2 >= 1, "hybrid: n2 must be >= 1");
  require(std::isfinite(p.mu) && std::isfinite(p.a), "hybrid: parameters must be finite");
  require(p.a > 0, "hybrid: a must be positive");
  require(p.b.rows() == p.n2 && p.b.cols() == p.n1 - 1,
          "hybrid: b must be an n2 x (n1-1) matrix");
  require(p.b.allFinite() && (p.b.array() > 0).all(), "hybrid: all b must be positive");
  Model m;
  m.family_ = Family::Hybrid;
  m.params_ = p;
  m.dim_ = (p.n1 - 1) * p.n2 + 1;
  m.compile_terms();
  return m;
}

void Model::compile_terms() {
  terms_.clear();
  switch (family_) {
    case Family::TwoD: {
      const auto& p = std::get<TwoDParams>(params_);
      terms_.push_back({0, -1, p.a, p.mu});
      terms_.push_back({1, 0, p.b, 0.0});
      decomposable_ = true;
      break;
    }
    case Family::Full: {
      const auto& p = std::get<FullParams>(params_);
      // Segment i contributes both a location term on x_i and a link to
      // x_{i+1}; interior variables end up with two terms, so no
      // single-parent factorization exists.
      for (int i = 0; i + 1 < p.n; ++i) {
        terms_.push_back({i, -1, p.scale, p.mu});
        terms_.push_back({i + 1, i, p.scale * p.quad_coeff, 0.0});
      }
      decomposable_ = false;
      break;
    }
    case Family::Even: {
      const auto& p = std::get<EvenParams>(params_);
      for (int k = 0; k < p.n / 2; ++k) {
        terms_.push_back({2 * k, -1, p.scale, p.mus[static_cast<std::size_t>(k)]});
        terms_.push_back({2 * k + 1, 2 * k, p.scale * p.quad_coeff, 0.0});
      }
      decomposable_ = true;
      break;
    }
    case Family::Hybrid: {
      const auto& p = std::get<HybridParams>(params_);
      terms_.push_back({0, -1, p.a, p.mu});
      for (int j = 1; j <= p.n2; ++j) {
        for (int i = 2; i <= p.n1; ++i) {
          const int child = 1 + (j - 1) * (p.n1 - 1) + (i - 2);
          const int parent = i == 2 ? 0 : child - 1;
          terms_.push_back({child, parent, p.b(j - 1, i - 2), 0.0});
        }
      }
      decomposable_ = true;
      break;
    }
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const GaussianTerm& l, const GaussianTerm& r) {
              return l.index < r.index || (l.index == r.index && l.parent < r.parent);
            });
}

const TwoDParams& Model::twod_params() const {
  if (family_ != Family::TwoD) raise(ErrorCode::InvalidArgument, "not a twod model");
  return std::get<TwoDParams>(params_);
}
const FullParams& Model::full_params() const {
  if (family_ != Family::Full) raise(ErrorCode::InvalidArgument, "not a full model");
  return std::get<FullParams>(params_);
}
const EvenParams& Model::even_params() const {
  if (family_ != Family::Even) raise(ErrorCode::InvalidArgument, "not an even model");
  return std::get<EvenParams>(params_);
}
const HybridParams& Model::hybrid_params() const {
  if (family_ != Family::Hybrid) raise(ErrorCode::InvalidArgument, "not a hybrid model");
  return std::get<HybridParams>(params_);
}

void Model::check_point(ConstVecRef x) const {
  if (x.size() != dim_) {
    std::ostringstream os;
    os << "point has dimension " << x.size() << ", model has dimension " << dim_;
    raise(ErrorCode::DimensionMismatch, os.str());
  }
  if (!all_finite(x))
    raise(ErrorCode::NonFiniteInput, "point has a non-finite component");
}

double Model::log_kernel(ConstVecRef x) const {
  check_point(x);
  double acc = 0.0;
  for (const auto& t : terms_) {
    const double r = t.parent < 0 ? x[t.index] - t.mu
                                  : x[t.index] - x[t.parent] * x[t.parent];
    acc -= t.coeff * r * r;
  }
  return acc;
}

Eigen::VectorXd Model::grad_log_kernel(ConstVecRef x) const {
  check_point(x);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  for (const auto& t : terms_) {
    if (t.parent < 0) {
      g[t.index] += -2.0 * t.coeff * (x[t.index] - t.mu);
    } else {
      const double xp = x[t.parent];
      const double r = x[t.index] - xp * xp;
      g[t.index] += -2.0 * t.coeff * r;
      g[t.parent] += 4.0 * t.coeff * xp * r;
    }
  }
  return g;
}

Eigen::MatrixXd Model::hessian_log_kernel(ConstVecRef x) const {
  check_point(x);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& t : terms_) {
    if (t.parent < 0) {
      h(t.index, t.index) += -2.0 * t.coeff;
    } else {
      const double xp = x[t.parent];
      const double r = x[t.index] - xp * xp;
      h(t.index, t.index) += -2.0 * t.coeff;
      const double cross = 4.0 * t.coeff * xp;
      h(t.index, t.parent) += cross;
      h(t.parent, t.index) += cross;
      h(t.parent, t.parent) += 4.0 * t.coeff * r - 8.0 * t.coeff * xp * xp;
    }
  }
  return h;
}

DensityEval Model::eval(ConstVecRef x, bool with_hessian) const {
  check_point(x);
  DensityEval out;
  out.grad = Eigen::VectorXd::Zero(dim_);
  double acc = 0.0;
  for (const auto& t : terms_) {
    if (t.parent < 0) {
      const double r = x[t.index] - t.mu;
      acc -= t.coeff * r * r;
      out.grad[t.index] += -2.0 * t.coeff * r;
    } else {
      const double xp = x[t.parent];
      const double r = x[t.index] - xp * xp;
      acc -= t.coeff * r * r;
      out.grad[t.index] += -2.0 * t.coeff * r;
      out.grad[t.parent] += 4.0 * t.coeff * xp * r;
    }
  }
  out.log_kernel = acc;
  if (with_hessian) out.hessian = hessian_log_kernel(x);
  return out;
}

std::optional<double> Model::log_norm_constant() const {
  // sqrt(a) * prod sqrt(b_{j,i}) / pi^{n/2}, evaluated in log space. Only the
  // 2-d and Hybrid kernels have a known constant; the chained Full kernel has
  // none, and the Even constant is treated as unknown as well.
  if (family_ != Family::TwoD && family_ != Family::Hybrid) return std::nullopt;
  double acc = 0.0;
  for (const auto& t : terms_) acc += 0.5 * std::log(t.coeff);
  acc -= 0.5 * dim_ * std::log(std::numbers::pi);
  return acc;
}

bool Model::decomposable() const { return decomposable_; }

const std::vector<GaussianTerm>& Model::conditional_decomposition() const {
  if (!decomposable_)
    raise(ErrorCode::NotAvailable,
          "the full kernel has no conditional decomposition");
  return terms_;
}

ConditionalGaussian Model::full3d_conditional_x2(double x1) const {
  if (family_ != Family::Full || std::get<FullParams>(params_).n != 3)
    raise(ErrorCode::InvalidArgument,
          "full3d_conditional_x2 requires the full family with n = 3");
  const auto& p = std::get<FullParams>(params_);
  const double b = p.coeff_b();
  const double c = p.coeff_a();
  const double denom = 2.0 * b + 2.0 * c;
  return {(2.0 * b * x1 * x1 + 2.0 * c * p.mu) / denom, 1.0 / denom};
}

std::vector<std::string> Model::component_names() const {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(dim_));
  if (family_ == Family::Hybrid) {
    const auto& p = std::get<HybridParams>(params_);
    names.push_back("x_1");
    for (int j = 1; j <= p.n2; ++j)
      for (int i = 2; i <= p.n1; ++i)
        names.push_back("x_" + std::to_string(j) + "_" + std::to_string(i));
  } else {
    for (int i = 1; i <= dim_; ++i) names.push_back("x_" + std::to_string(i));
  }
  return names;
}

std::string Model::to_json() const {
  json j;
  j["family"] = family_name(family_);
  switch (family_) {
    case Family::TwoD: {
      const auto& p = std::get<TwoDParams>(params_);
      j["mu"] = p.mu;
      j["a"] = p.a;
      j["b"] = p.b;
      break;
    }
    case Family::Full: {
      const auto& p = std::get<FullParams>(params_);
      j["n"] = p.n;
      j["scale"] = p.scale;
      j["quad_coeff"] = p.quad_coeff;
      j["mu"] = p.mu;
      break;
    }
    case Family::Even: {
      const auto& p = std::get<EvenParams>(params_);
      j["n"] = p.n;
      j["mus"] = p.mus;
      j["scale"] = p.scale;
      j["quad_coeff"] = p.quad_coeff;
      break;
    }
    case Family::Hybrid: {
      const auto& p = std::get<HybridParams>(params_);
      j["mu"] = p.mu;
      j["a"] = p.a;
      j["n1"] = p.n1;
      j["n2"] = p.n2;
      auto rows = json::array();
      for (int r = 0; r < p.b.rows(); ++r) {
        auto row = json::array();
        for (int c = 0; c < p.b.cols(); ++c) row.push_back(p.b(r, c));
        rows.push_back(std::move(row));
      }
      j["b"] = std::move(rows);
      break;
    }
  }
  return j.dump();
}

Model Model::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::Parse, std::string("invalid model JSON: ") + e.what());
  }
  if (!j.contains("family") || !j.at("family").is_string())
    raise(ErrorCode::Parse, "model JSON needs a string 'family' field");
  const std::string fam = j.at("family").get<std::string>();

  if (fam == "twod") {
    TwoDParams p;
    p.mu = as_number(j, "mu");
    p.a = as_number(j, "a");
    p.b = as_number(j, "b");
    return twod(p);
  }
  if (fam == "full") {
    FullParams p;
    p.n = as_int(j, "n");
    p.scale = j.contains("scale") ? as_number(j, "scale") : p.scale;
    p.quad_coeff = j.contains("quad_coeff") ? as_number(j, "quad_coeff") : p.quad_coeff;
    p.mu = j.contains("mu") ? as_number(j, "mu") : p.mu;
    return full(p);
  }
  if (fam == "even") {
    EvenParams p;
    p.n = as_int(j, "n");
    p.scale = j.contains("scale") ? as_number(j, "scale") : p.scale;
    p.quad_coeff = j.contains("quad_coeff") ? as_number(j, "quad_coeff") : p.quad_coeff;
    p.mus.clear();
    if (!j.contains("mus")) raise(ErrorCode::Parse, "even model needs 'mus'");
    const json& mus = j.at("mus");
    if (mus.is_array()) {
      for (const auto& v : mus) p.mus.push_back(number_value(v, "mus entry"));
    } else {
      // scalar broadcasts over all pairs
      p.mus.assign(static_cast<std::size_t>(std::max(p.n / 2, 0)),
                   number_value(mus, "mus"));
    }
    return even(p);
  }
  if (fam == "hybrid") {
    HybridParams p;
    p.mu = as_number(j, "mu");
    p.a = as_number(j, "a");
    p.n1 = as_int(j, "n1");
    p.n2 = as_int(j, "n2");
    if (!j.contains("b")) raise(ErrorCode::Parse, "hybrid model needs 'b'");
    const json& b = j.at("b");
    if (b.is_array()) {
      if (p.n1 < 2 || p.n2 < 1)
        raise(ErrorCode::InvalidArgument, "hybrid: n1 must be >= 2 and n2 >= 1");
      p.b.resize(p.n2, p.n1 - 1);
      if (b.size() != static_cast<std::size_t>(p.n2))
        raise(ErrorCode::Parse, "hybrid: b must have n2 rows");
      for (int r = 0; r < p.n2; ++r) {
        const json& row = b.at(static_cast<std::size_t>(r));
        if (!row.is_array() || row.size() != static_cast<std::size_t>(p.n1 - 1))
          raise(ErrorCode::Parse, "hybrid: each b row must have n1-1 entries");
        for (int c = 0; c < p.n1 - 1; ++c)
          p.b(r, c) = number_value(row.at(static_cast<std::size_t>(c)), "b entry");
      }
    } else {
      // scalar broadcast
      p = HybridParams::uniform(p.n1, p.n2, p.mu, p.a, as_number(j, "b"));
    }
    return hybrid(p);
  }
  raise(ErrorCode::Parse, "unknown family '" + fam + "'");
}

}  // namespace rosenbench
