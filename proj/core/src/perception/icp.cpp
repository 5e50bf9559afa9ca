#include "packbot/perception/icp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace packbot::percept {

using geom::Mat3;
using geom::Pose;
using geom::Vec3;

namespace {

/// Small static kd-tree over 3D points; nearest-neighbor only.
class KdTree3 {
 public:
  explicit KdTree3(const std::vector<Vec3>& points) : pts_(points) {
    index_.resize(pts_.size());
    std::iota(index_.begin(), index_.end(), 0);
    nodes_.reserve(pts_.size());
    root_ = build(0, static_cast<int>(pts_.size()), 0);
  }

  std::pair<int, double> nearest(const Vec3& q) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    search(root_, q, best, best_d2);
    return {best, best_d2};
  }

 private:
  struct Node {
    int point = -1;
    int left = -1;
    int right = -1;
    int axis = 0;
  };

  int build(int lo, int hi, int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % 3;
    const int mid = (lo + hi) / 2;
    std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                     [&](int a, int b) { return pts_[a][axis] < pts_[b][axis]; });
    Node node;
    node.point = index_[mid];
    node.axis = axis;
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    nodes_[self].left = build(lo, mid, depth + 1);
    nodes_[self].right = build(mid + 1, hi, depth + 1);
    return self;
  }

  void search(int node_id, const Vec3& q, int& best, double& best_d2) const {
    if (node_id < 0) return;
    const Node& node = nodes_[node_id];
    const Vec3& p = pts_[node.point];
    const double d2 = (p - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = node.point;
    }
    const double delta = q[node.axis] - p[node.axis];
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, best, best_d2);
    if (delta * delta < best_d2) search(far, q, best, best_d2);
  }

  std::vector<Vec3> pts_;
  std::vector<int> index_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Optimal rigid transform mapping model points onto observed points.
Pose kabsch(const std::vector<Vec3>& model, const std::vector<Vec3>& observed) {
  Vec3 mc = Vec3::Zero(), oc = Vec3::Zero();
  const double n = static_cast<double>(model.size());
  for (const Vec3& p : model) mc += p;
  for (const Vec3& p : observed) oc += p;
  mc /= n;
  oc /= n;
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < model.size(); ++i)
    h += (model[i] - mc) * (observed[i] - oc).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() > 0 ? 1.0 : -1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  return Pose::from_matrix(r, oc - r * mc);
}

void check_rank(const geom::PointCloud& cloud) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : cloud.points) mean += p;
  mean /= static_cast<double>(cloud.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : cloud.points) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 ev = eig.eigenvalues();  // ascending
  if (ev[1] < 1e-12 * std::max(1.0, ev[2]) || ev[2] < 1e-18)
    throw DegenerateCloud("observed cloud is coincident or colinear (rank < 2)");
}

}  // namespace

std::vector<Mat3> octahedral_rotations() {
  std::vector<Mat3> out;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& perm : perms) {
    for (int bits = 0; bits < 8; ++bits) {
      Mat3 m = Mat3::Zero();
      for (int c = 0; c < 3; ++c)
        m(perm[c], c) = (bits >> c) & 1 ? -1.0 : 1.0;
      if (m.determinant() > 0.5) out.push_back(m);
    }
  }
  // Identity (first permutation, no sign flips) sorts to the front already.
  return out;
}

IcpResult icp_register(const geom::PointCloud& observed, const geom::ShapePrimitive& model,
                       int initial_guesses, const IcpParams& params) {
  if (observed.size() < 10)
    throw std::invalid_argument("icp_register requires at least 10 observed points");
  check_rank(observed);
  if (initial_guesses < 1) initial_guesses = 1;

  const geom::PointCloud model_cloud =
      geom::sample_surface(model, static_cast<std::size_t>(params.model_points),
                           params.model_seed);
  KdTree3 tree(model_cloud.points);

  Vec3 obs_centroid = Vec3::Zero();
  for (const Vec3& p : observed.points) obs_centroid += p;
  obs_centroid /= static_cast<double>(observed.size());
  Vec3 model_centroid = Vec3::Zero();
  for (const Vec3& p : model_cloud.points) model_centroid += p;
  model_centroid /= static_cast<double>(model_cloud.points.size());

  std::vector<Mat3> starts = octahedral_rotations();
  // Deterministic extras beyond the octahedral set: golden-angle spins about
  // a cycling axis.
  while (static_cast<int>(starts.size()) < initial_guesses) {
    const int k = static_cast<int>(starts.size()) - 23;
    const double angle = std::fmod(k * 2.399963229728653, 2.0 * M_PI);
    Vec3 axis = Vec3::Zero();
    axis[k % 3] = 1.0;
    starts.push_back(Eigen::AngleAxisd(angle, axis).toRotationMatrix());
  }
  starts.resize(static_cast<std::size_t>(initial_guesses));

  IcpResult best;
  best.residual = std::numeric_limits<double>::infinity();

  std::vector<Vec3> corr_model(observed.size());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Pose pose = Pose::from_matrix(starts[s], obs_centroid - starts[s] * model_centroid);
    std::vector<double> history;
    double prev_res = std::numeric_limits<double>::infinity();
    double res = prev_res;

    for (int iter = 0; iter < params.max_iterations; ++iter) {
      const Pose inv = inverse(pose);
      double sum_sq = 0.0;
      for (std::size_t i = 0; i < observed.points.size(); ++i) {
        const Vec3 q = inv.apply(observed.points[i]);
        const auto [idx, d2] = tree.nearest(q);
        corr_model[i] = model_cloud.points[static_cast<std::size_t>(idx)];
        sum_sq += d2;  // rigid: |m - P^-1 o| == |P m - o|
      }
      res = std::sqrt(sum_sq / static_cast<double>(observed.points.size()));
      history.push_back(res);
      if (std::abs(prev_res - res) < params.convergence_tol) break;
      prev_res = res;
      pose = kabsch(corr_model, observed.points);
    }

    if (res < best.residual) {
      best.pose = pose;
      best.residual = res;
      best.best_start = static_cast<int>(s);
      best.residual_history = std::move(history);
    }
    // A residual this small cannot be beaten by another basin meaningfully.
    if (best.residual < 1e-10) break;
  }

  best.converged = best.residual < params.accept_residual;
  return best;
}

}  // namespace packbot::percept
