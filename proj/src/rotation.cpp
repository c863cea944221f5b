#include <cmath>

#include "wavefront/group.hpp"

namespace wf {

Mat random_rotation(Rng& rng, int d) {
  Mat g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = random_normal_vector(rng, d);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  // q is now Haar on O(d); flipping one column lands in SO(d) without bias.
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

static Vec some_orthogonal(const Vec& u) {
  const int d = static_cast<int>(u.size());
  int k = 0;
  for (int i = 1; i < d; ++i) {
    if (std::abs(u[i]) < std::abs(u[k])) k = i;
  }
  Vec w = Vec::Zero(d);
  w[k] = 1.0;
  w -= w.dot(u) * u;
  return w / w.norm();
}

Mat rotation_taking(const Vec& from, const Vec& to) {
  const int d = static_cast<int>(from.size());
  if (to.size() != d) throw InvalidArgument("rotation_taking: dimension mismatch");
  const double nf = from.norm(), nt = to.norm();
  if (nf == 0.0 || nt == 0.0) throw InvalidArgument("rotation_taking: zero vector");
  Vec u = from / nf, v = to / nt;
  Mat id = Mat::Identity(d, d);
  double c = std::clamp(u.dot(v), -1.0, 1.0);
  Vec perp = v - c * u;
  double s = perp.norm();
  if (s < 1e-15) {
    if (c > 0) return id;
    Vec w = some_orthogonal(u);
    return id - 2.0 * u * u.transpose() - 2.0 * w * w.transpose();
  }
  Vec w = perp / s;
  return id + (c - 1.0) * (u * u.transpose() + w * w.transpose()) +
         s * (w * u.transpose() - u * w.transpose());
}

Mat random_rotation_fixing(Rng& rng, const Vec& axis) {
  const int d = static_cast<int>(axis.size());
  Vec u = axis / axis.norm();
  if (d == 2) return Mat::Identity(2, 2);
  // Orthonormal basis whose first column is u.
  Mat basis = rotation_taking(Vec::Unit(d, 0), u);
  Mat inner = Mat::Identity(d, d);
  inner.bottomRightCorner(d - 1, d - 1) = random_rotation(rng, d - 1);
  return basis * inner * basis.transpose();
}

}  // namespace wf
