#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/cdga.hpp"

namespace sectcat {

/// A cochain complex stored on the window [low, high]. The flags say whether
/// the complex is genuinely zero outside the window; where it is not, the
/// edge degree's cohomology is unknown and excluded from the certified range.
struct CochainComplex {
  int low = 0;
  std::vector<std::size_t> dims;  // degrees low..high
  std::vector<SparseMatrix> d;    // d[k - low]: k -> k + 1, k in [low, high)
  bool zero_below = true;
  bool zero_above = false;

  int high() const { return low + static_cast<int>(dims.size()) - 1; }
  std::size_t dim(int k) const { return k >= low && k <= high() ? dims[k - low] : 0; }
  int certified_low() const { return zero_below ? low : low + 1; }
  int certified_high() const { return zero_above ? high() : high() - 1; }
  bool certified(int k) const {
    if (k < low) return zero_below;
    if (k > high()) return zero_above;
    return k >= certified_low() && k <= certified_high();
  }

  /// d: k -> k + 1, zero outside the window.
  SparseMatrix d_at(int k) const {
    if (k >= low && k < high()) return d[k - low];
    return SparseMatrix(dim(k + 1), dim(k));
  }

  /// First degree where d^2 != 0, if any.
  std::optional<int> square_defect() const {
    for (int k = low; k + 1 < high(); ++k) {
      if (!(d_at(k + 1) * d_at(k)).is_zero()) return k;
    }
    return std::nullopt;
  }
};

inline CochainComplex complex_of(const Cdga& a) {
  CochainComplex c;
  c.low = 0;
  for (int k = 0; k <= a.top(); ++k) c.dims.push_back(a.dim(k));
  for (int k = 0; k < a.top(); ++k) c.d.push_back(a.d(k));
  c.zero_below = true;
  c.zero_above = a.finite();
  return c;
}

/// Cohomology in a single degree: cocycles, coboundaries, chosen
/// representatives and a classifier turning cocycles into class coordinates.
class DegreeCohomology {
 public:
  DegreeCohomology(int degree, std::size_t cochain_dim, const SparseMatrix& d_in, const SparseMatrix& d_out)
      : degree_(degree), cochain_dim_(cochain_dim), classifier_(cochain_dim, true) {
    cocycles_ = rank_kernel_image(d_out).kernel;
    for (const auto& c : d_in.columns()) {
      if (classifier_.insert(c)) coboundaries_.push_back(c);
      input_to_class_.push_back(npos);
    }
    // Extend the coboundaries by cocycles in echelon order.
    for (const auto& z : cocycles_) {
      if (classifier_.insert(z)) {
        input_to_class_.push_back(representatives_.size());
        representatives_.push_back(z);
      } else {
        input_to_class_.push_back(npos);
      }
    }
    if (coboundaries_.size() + representatives_.size() != cocycles_.size()) {
      throw InputError("d^2 != 0 around degree " + std::to_string(degree) +
                       ": coboundaries are not all cocycles");
    }
  }

  int degree() const { return degree_; }
  std::size_t cochain_dim() const { return cochain_dim_; }
  std::size_t betti() const { return representatives_.size(); }
  const std::vector<SparseVector>& cocycles() const { return cocycles_; }
  const std::vector<SparseVector>& coboundaries() const { return coboundaries_; }
  const std::vector<SparseVector>& representatives() const { return representatives_; }

  /// Class coordinates of a cocycle; nullopt if z is not a cocycle.
  std::optional<SparseVector> class_of(const SparseVector& z) const {
    auto c = classifier_.coordinates(z);
    if (!c) return std::nullopt;
    SparseVector out;
    for (const auto& [input, v] : c->entries()) {
      std::size_t cls = input_to_class_[input];
      if (cls != npos) out.add_to(cls, v);
    }
    return out;
  }

  /// Cocycle representing the class with the given coordinates.
  SparseVector cocycle_of(const SparseVector& cls) const {
    SparseVector out;
    for (const auto& [i, v] : cls.entries()) out.axpy(v, representatives_.at(i));
    return out;
  }

  bool is_coboundary(const SparseVector& z) const {
    auto c = class_of(z);
    return c && c->is_zero();
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  int degree_;
  std::size_t cochain_dim_;
  std::vector<SparseVector> cocycles_;
  std::vector<SparseVector> coboundaries_;
  std::vector<SparseVector> representatives_;
  Reducer classifier_;
  std::vector<std::size_t> input_to_class_;
};

/// Cohomology of a complex on its certified range [low, high].
class CohomologyData {
 public:
  CohomologyData() = default;
  CohomologyData(int low, std::vector<DegreeCohomology> degrees) : low_(low), degrees_(std::move(degrees)) {}

  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(degrees_.size()) - 1; }
  bool covers(int k) const { return k >= low_ && k <= high(); }
  const DegreeCohomology& at(int k) const {
    if (!covers(k)) throw std::out_of_range("cohomology not computed in degree " + std::to_string(k));
    return degrees_[k - low_];
  }
  std::size_t betti(int k) const { return covers(k) ? at(k).betti() : 0; }

  std::vector<std::size_t> betti_numbers() const {
    std::vector<std::size_t> out;
    for (const auto& d : degrees_) out.push_back(d.betti());
    return out;
  }

  /// Highest degree with nonzero cohomology, if any.
  std::optional<int> top_degree() const {
    for (int k = high(); k >= low_; --k) {
      if (betti(k)) return k;
    }
    return std::nullopt;
  }

 private:
  int low_ = 0;
  std::vector<DegreeCohomology> degrees_;
};

/// H^k for k in the certified range of the complex (optionally clipped).
inline CohomologyData cohomology(const CochainComplex& c, std::optional<int> max_degree = std::nullopt) {
  if (auto bad = c.square_defect()) {
    throw InputError("d^2 != 0 starting in degree " + std::to_string(*bad));
  }
  int lo = c.certified_low();
  int hi = c.certified_high();
  if (max_degree) hi = std::min(hi, *max_degree);
  std::vector<DegreeCohomology> degrees;
  for (int k = lo; k <= hi; ++k) degrees.emplace_back(k, c.dim(k), c.d_at(k - 1), c.d_at(k));
  return CohomologyData(lo, std::move(degrees));
}

inline CohomologyData cohomology(const Cdga& a, std::optional<int> max_degree = std::nullopt) {
  return cohomology(complex_of(a), max_degree);
}

/// Matrices of H(f) on the chosen representative bases.
struct InducedMap {
  std::map<int, SparseMatrix> blocks;

  int low() const { return blocks.empty() ? 0 : blocks.begin()->first; }
  int high() const { return blocks.empty() ? -1 : blocks.rbegin()->first; }
  const SparseMatrix& at(int k) const { return blocks.at(k); }
};

/// H(f) for a degree-0 map on the degrees both cohomologies cover. Throws
/// InputError naming the degree and a witness when f is not a chain map.
inline InducedMap induced_map(const GradedMap& f, const CohomologyData& source, const CohomologyData& target,
                              std::optional<int> lo = std::nullopt, std::optional<int> hi = std::nullopt) {
  if (f.degree() != 0) throw InputError("induced_map expects a degree-0 map");
  int a = std::max(source.low(), target.low());
  int b = std::min(source.high(), target.high());
  if (lo) a = std::max(a, *lo);
  if (hi) b = std::min(b, *hi);
  InducedMap out;
  for (int k = a; k <= b; ++k) {
    const auto& hs = source.at(k);
    const auto& ht = target.at(k);
    std::vector<SparseVector> cols;
    for (std::size_t i = 0; i < hs.representatives().size(); ++i) {
      SparseVector img = f.apply(k, hs.representatives()[i]);
      auto cls = ht.class_of(img);
      if (!cls) {
        throw InputError("not a chain map in degree " + std::to_string(k) + ": image of representative " +
                         hs.representatives()[i].str() + " is not a cocycle");
      }
      cols.push_back(std::move(*cls));
    }
    for (const auto& b0 : hs.coboundaries()) {
      if (!ht.is_coboundary(f.apply(k, b0))) {
        throw InputError("induced map ill-defined in degree " + std::to_string(k) +
                         ": a coboundary maps outside the coboundaries");
      }
    }
    out.blocks[k] = SparseMatrix::from_columns(ht.betti(), std::move(cols));
  }
  return out;
}

struct InjectivityResult {
  bool injective = true;
  int low = 0;
  int high = -1;
  std::optional<int> failing_degree;
  SparseVector witness_class;    // kernel vector in H coordinates
  SparseVector witness_cocycle;  // its representative in the source
};

/// Degree-by-degree injectivity of H(f) on [lo, hi] (defaults to the range of
/// the induced map).
inline InjectivityResult is_injective_on_H(const InducedMap& hf, const CohomologyData& source,
                                           std::optional<int> lo = std::nullopt,
                                           std::optional<int> hi = std::nullopt) {
  InjectivityResult r;
  r.low = lo.value_or(hf.low());
  r.high = hi.value_or(hf.high());
  for (int k = r.low; k <= r.high; ++k) {
    auto it = hf.blocks.find(k);
    if (it == hf.blocks.end()) throw InputError("induced map missing degree " + std::to_string(k));
    auto rk = rank_kernel_image(it->second);
    if (!rk.kernel.empty()) {
      r.injective = false;
      r.failing_degree = k;
      r.witness_class = rk.kernel.front();
      r.witness_cocycle = source.at(k).cocycle_of(r.witness_class);
      return r;
    }
  }
  return r;
}

struct IsoResult {
  bool iso = true;
  std::optional<int> failing_degree;
  std::string reason;
};

/// Whether H(f) is an isomorphism on [lo, hi]. Degrees where a complex is
/// certified zero count as zero cohomology.
inline IsoResult is_iso_on_H(const GradedMap& f, const CochainComplex& source, const CochainComplex& target, int lo,
                             int hi) {
  IsoResult r;
  for (int k = lo; k <= hi; ++k) {
    if (!source.certified(k) || !target.certified(k)) {
      return IsoResult{false, k, "cohomology not certified in degree " + std::to_string(k)};
    }
  }
  int slo = std::max(lo, source.low), shi = std::min(hi, source.high());
  int tlo = std::max(lo, target.low), thi = std::min(hi, target.high());
  auto hs = cohomology(source);
  auto ht = cohomology(target);
  for (int k = lo; k <= hi; ++k) {
    bool s_in = k >= slo && k <= shi;
    bool t_in = k >= tlo && k <= thi;
    std::size_t bs = s_in ? hs.betti(k) : 0;
    std::size_t bt = t_in ? ht.betti(k) : 0;
    if (bs != bt) {
      return IsoResult{false, k, "betti numbers differ in degree " + std::to_string(k) + ": " +
                                     std::to_string(bs) + " vs " + std::to_string(bt)};
    }
    if (bs == 0) continue;
    auto m = induced_map(f, hs, ht, k, k);
    if (rank_kernel_image(m.at(k)).rank != bs) {
      return IsoResult{false, k, "H(f) singular in degree " + std::to_string(k)};
    }
  }
  return r;
}

}  // namespace sectcat
