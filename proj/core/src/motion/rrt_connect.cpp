#include "packbot/motion/rrt_connect.hpp"

#include "packbot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace packbot::motion {

namespace {

using Composite = Eigen::VectorXd;

Composite pack(const DualConfig& c) {
  Composite q(c.left.size() + c.right.size());
  q.head(c.left.size()) = c.left;
  q.tail(c.right.size()) = c.right;
  return q;
}

DualConfig unpack(const Composite& q, int left_dof, int right_dof) {
  return {q.head(left_dof), q.tail(right_dof)};
}

double dist_inf(const Composite& a, const Composite& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

struct Tree {
  std::vector<Composite> nodes;
  std::vector<int> parents;

  int nearest(const Composite& q) const {
    int best = 0;
    double best_d = dist_inf(nodes[0], q);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const double d = dist_inf(nodes[i], q);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  int add(const Composite& q, int parent) {
    nodes.push_back(q);
    parents.push_back(parent);
    return static_cast<int>(nodes.size()) - 1;
  }

  std::vector<Composite> path_to_root(int index) const {
    std::vector<Composite> out;
    for (int i = index; i >= 0; i = parents[static_cast<std::size_t>(i)]) {
      out.push_back(nodes[static_cast<std::size_t>(i)]);
    }
    return out;
  }
};

struct Validator {
  const CollisionWorld& world;
  const DualArmModel& models;
  const RrtParams& params;
  int left_dof;
  int right_dof;

  bool config_free(const Composite& q, bool slack) const {
    const double margin = world.clearance + (slack ? params.validation_slack : 0.0);
    return !in_collision(world, models, unpack(q, left_dof, right_dof), margin);
  }

  // Endpoints are assumed already validated; interior samples carry the
  // slack so the continuous segment cannot dip under the margin unnoticed.
  bool edge_free(const Composite& a, const Composite& b) const {
    const double d = dist_inf(a, b);
    const int steps = std::max(1, static_cast<int>(std::ceil(d / params.check_res)));
    for (int i = 1; i < steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      if (!config_free(a + t * (b - a), true)) return false;
    }
    return true;
  }
};

enum class ExtendStatus { trapped, advanced, reached };

ExtendStatus extend(Tree& tree, const Composite& target, const Validator& v, double step,
                    int& new_index) {
  const int near = tree.nearest(target);
  const Composite& q_near = tree.nodes[static_cast<std::size_t>(near)];
  const double d = dist_inf(q_near, target);
  Composite q_new;
  bool reached = false;
  if (d <= step) {
    q_new = target;
    reached = true;
  } else {
    q_new = q_near + (step / d) * (target - q_near);
  }
  if (!v.config_free(q_new, true) || !v.edge_free(q_near, q_new)) return ExtendStatus::trapped;
  new_index = tree.add(q_new, near);
  return reached ? ExtendStatus::reached : ExtendStatus::advanced;
}

std::vector<Composite> shortcut(std::vector<Composite> path, const Validator& v, int iters,
                                Rng& rng) {
  if (path.size() < 3) return path;
  for (int k = 0; k < iters; ++k) {
    if (path.size() < 3) break;
    const std::size_t i = rng.uniform_int(path.size() - 2);
    const std::size_t j = i + 2 + rng.uniform_int(path.size() - i - 2);
    if (j >= path.size()) continue;
    if (v.edge_free(path[i], path[j])) {
      path.erase(path.begin() + static_cast<long>(i) + 1, path.begin() + static_cast<long>(j));
    }
  }
  return path;
}

std::vector<Composite> densify(const std::vector<Composite>& path, double step) {
  std::vector<Composite> out;
  if (path.empty()) return out;
  out.push_back(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double d = dist_inf(path[i - 1], path[i]);
    const int steps = std::max(1, static_cast<int>(std::ceil(d / step)));
    for (int s = 1; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      out.push_back(path[i - 1] + t * (path[i] - path[i - 1]));
    }
  }
  return out;
}

}  // namespace

bool edge_valid(const CollisionWorld& world, const DualArmModel& models, const DualConfig& a,
                const DualConfig& b, const RrtParams& params) {
  Validator v{world, models, params, static_cast<int>(a.left.size()),
              static_cast<int>(a.right.size())};
  return v.edge_free(pack(a), pack(b));
}

PlanResult rrt_connect(const CollisionWorld& world, const DualArmModel& models,
                       const DualConfig& start, const DualConfig& goal, const RrtParams& params,
                       std::uint64_t seed) {
  const int left_dof = models.left.dof();
  const int right_dof = models.right.dof();
  if (!models.left.within_limits(start.left) || !models.right.within_limits(start.right) ||
      !models.left.within_limits(goal.left) || !models.right.within_limits(goal.right))
    throw std::invalid_argument("rrt_connect: start or goal outside joint limits");

  Validator v{world, models, params, left_dof, right_dof};
  const Composite q_start = pack(start);
  const Composite q_goal = pack(goal);
  if (!v.config_free(q_start, false))
    throw std::invalid_argument("rrt_connect: start configuration is in collision");
  if (!v.config_free(q_goal, false))
    throw std::invalid_argument("rrt_connect: goal configuration is in collision");

  PlanResult result;
  auto finish = [&](std::vector<Composite> composite_path, Rng& rng) {
    composite_path = shortcut(std::move(composite_path), v, params.shortcut_iters, rng);
    composite_path = densify(composite_path, params.step);
    result.status = PlanStatus::ok;
    result.path.configs.clear();
    result.path.configs.reserve(composite_path.size());
    for (const auto& q : composite_path)
      result.path.configs.push_back(unpack(q, left_dof, right_dof));
    return result;
  };

  Rng rng(seed);

  if (dist_inf(q_start, q_goal) < 1e-12) {
    result.status = PlanStatus::ok;
    result.path.configs = {start};
    return result;
  }

  // Trivial connect first; most short mapped segments resolve here.
  if (v.edge_free(q_start, q_goal)) {
    return finish({q_start, q_goal}, rng);
  }

  Tree tree_a, tree_b;
  tree_a.add(q_start, -1);
  tree_b.add(q_goal, -1);
  Tree* from_start = &tree_a;
  Tree* from_goal = &tree_b;
  bool swapped = false;

  std::vector<std::pair<double, double>> limits;
  limits.reserve(static_cast<std::size_t>(left_dof + right_dof));
  for (const auto& j : models.left.joints) limits.emplace_back(j.min_rad, j.max_rad);
  for (const auto& j : models.right.joints) limits.emplace_back(j.min_rad, j.max_rad);

  for (int iter = 0; iter < params.max_iters; ++iter) {
    result.iterations = iter + 1;
    Composite q_rand(left_dof + right_dof);
    for (int i = 0; i < q_rand.size(); ++i)
      q_rand[i] = rng.uniform(limits[static_cast<std::size_t>(i)].first,
                              limits[static_cast<std::size_t>(i)].second);

    int new_a = -1;
    if (extend(*from_start, q_rand, v, params.step, new_a) != ExtendStatus::trapped) {
      const Composite q_new = from_start->nodes[static_cast<std::size_t>(new_a)];
      // CONNECT: greedily extend the other tree toward the new node.
      int new_b = -1;
      ExtendStatus st;
      do {
        st = extend(*from_goal, q_new, v, params.step, new_b);
      } while (st == ExtendStatus::advanced);
      if (st == ExtendStatus::reached) {
        auto part_a = from_start->path_to_root(new_a);   // new ... start-side root
        auto part_b = from_goal->path_to_root(new_b);    // new ... goal-side root
        std::reverse(part_a.begin(), part_a.end());
        // Drop the duplicated meeting node.
        part_a.insert(part_a.end(), part_b.begin() + 1, part_b.end());
        if (swapped) std::reverse(part_a.begin(), part_a.end());
        return finish(std::move(part_a), rng);
      }
    }
    std::swap(from_start, from_goal);
    swapped = !swapped;
  }

  result.status = PlanStatus::no_path;
  return result;
}

}  // namespace packbot::motion
