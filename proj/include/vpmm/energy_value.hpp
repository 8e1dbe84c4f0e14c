#ifndef VPMM_ENERGY_VALUE_HPP
#define VPMM_ENERGY_VALUE_HPP

#include <cmath>

#include "vpmm/errors.hpp"

namespace vpmm {

// Extended-real energy value. States outside the admissible domain
// (det <= 0 somewhere) carry an absorbing "infinite" marker instead of a
// large float, so that line searches and comparisons can never mistake
// them for finite energies.
class EnergyValue {
 public:
  EnergyValue() : finite_(true), v_(0.0) {}
  explicit EnergyValue(double v) : finite_(true), v_(v) {}

  static EnergyValue infinite() {
    EnergyValue e;
    e.finite_ = false;
    e.v_ = 0.0;
    return e;
  }

  bool is_finite() const { return finite_; }

  double value() const {
    if (!finite_) throw InfiniteEnergyState("EnergyValue: state has infinite energy");
    return v_;
  }

  EnergyValue operator+(const EnergyValue& o) const {
    if (!finite_ || !o.finite_) return infinite();
    return EnergyValue(v_ + o.v_);
  }
  EnergyValue operator+(double x) const {
    if (!finite_) return infinite();
    return EnergyValue(v_ + x);
  }
  EnergyValue& operator+=(const EnergyValue& o) {
    *this = *this + o;
    return *this;
  }
  EnergyValue operator*(double s) const {
    if (!finite_) return infinite();
    return EnergyValue(v_ * s);
  }

  //  finite < infinite;  infinite is never < anything.
  bool less_than(const EnergyValue& o) const {
    if (!finite_) return false;
    if (!o.finite_) return true;
    return v_ < o.v_;
  }

 private:
  bool finite_;
  double v_;
};

}  // namespace vpmm

#endif
