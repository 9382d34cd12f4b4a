#include "formalcr/gaussian.hpp"

#include <stdexcept>

namespace formalcr {

Gaussian& Gaussian::operator*=(const Gaussian& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Gaussian& Gaussian::operator/=(const Gaussian& o) {
  if (o.is_zero()) throw std::domain_error("division by zero in Q(i)");
  if (sgn(o.im_) == 0) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  const Rational n = o.norm();
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

void Gaussian::add_product(const Gaussian& a, const Gaussian& b) {
  const bool ar = sgn(a.im_) == 0;
  const bool br = sgn(b.im_) == 0;
  if (ar && br) {
    re_ += a.re_ * b.re_;
  } else if (ar) {
    re_ += a.re_ * b.re_;
    im_ += a.re_ * b.im_;
  } else if (br) {
    re_ += a.re_ * b.re_;
    im_ += a.im_ * b.re_;
  } else {
    re_ += a.re_ * b.re_ - a.im_ * b.im_;
    im_ += a.re_ * b.im_ + a.im_ * b.re_;
  }
}

std::string rational_to_string(const Rational& q) { return q.get_str(10); }

std::string Gaussian::to_string() const {
  const bool has_re = sgn(re_) != 0;
  const bool has_im = sgn(im_) != 0;
  if (!has_im) return rational_to_string(re_);

  std::string imag;
  if (im_ == 1) {
    imag = "i";
  } else if (im_ == -1) {
    imag = "-i";
  } else {
    imag = rational_to_string(im_) + "*i";
  }
  if (!has_re) return imag;

  std::string out = "(" + rational_to_string(re_);
  if (sgn(im_) < 0) {
    out += " - ";
    Rational mag = -im_;
    out += (mag == 1) ? std::string("i") : rational_to_string(mag) + "*i";
  } else {
    out += " + " + imag;
  }
  out += ")";
  return out;
}

std::size_t Gaussian::hash() const {
  std::hash<std::string> h;
  return h(re_.get_str(16)) ^ (h(im_.get_str(16)) * 31u);
}

std::ostream& operator<<(std::ostream& os, const Gaussian& g) { return os << g.to_string(); }

}  // namespace formalcr
