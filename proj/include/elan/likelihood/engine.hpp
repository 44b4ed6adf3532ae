#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <tuple>
#include <vector>

#include "elan/error.hpp"
#include "elan/likelihood/branch_model.hpp"
#include "elan/sdg/sdg.hpp"
#include "elan/sdg/slicing.hpp"

namespace elan::likelihood {

using sdg::VertexId;

struct LikelihoodQuery {
  VertexId target = 0;
  std::optional<VertexId> start;  // defaults to the program entry
  BranchModel model;
};

struct LikelihoodResult {
  VertexId vertex = 0;
  double likelihood = 0.0;
  ModelKind model = ModelKind::Simple;
  VertexId start = 0;
  bool unreachable = false;

  bool operator==(const LikelihoodResult&) const = default;
};

namespace detail {

// Depth-first enumeration of the acyclic paths from a source to one target
// inside a region (a chop). Each vertex w yields p_{w,target}: successors are
// grouped by edge label, each group is the noisy-or of its members, and the
// groups are merged according to w's kind.
class Traversal {
 public:
  Traversal(const sdg::Sdg& g, const BranchModel& model, VertexId target,
            const sdg::Membership& region)
      : g_(g), model_(model), target_(target), region_(region),
        on_stack_(g.size(), -1), memo_(g.size(), -1.0) {}

  double run(VertexId source) { return visit(source, 0).p; }

 private:
  struct Outcome {
    double p;
    int low;  // shallowest stack depth of a vertex that was skipped as a cycle
  };

  struct Group {
    sdg::EdgeLabel label;
    double p;  // P(at least one member path is taken)
  };

  Outcome visit(VertexId w, int depth) {
    if (w == target_) return {1.0, INT_MAX};
    if (memo_[w] >= 0.0) return {memo_[w], INT_MAX};

    on_stack_[w] = depth;
    int low = INT_MAX;
    std::vector<Group> groups;
    for (const auto& adj : g_.successors(w)) {
      if (!region_[adj.vertex]) continue;
      if (on_stack_[adj.vertex] >= 0) {
        low = std::min(low, on_stack_[adj.vertex]);
        continue;
      }
      const Outcome sub = visit(adj.vertex, depth + 1);
      low = std::min(low, sub.low);
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const Group& gr) { return gr.label == adj.label; });
      if (it == groups.end()) {
        groups.push_back({adj.label, sub.p});
      } else {
        it->p = it->p + sub.p - it->p * sub.p;
      }
    }
    on_stack_[w] = -1;

    const double p = combine(g_.vertex(w), groups);
    // A result that did not cut through any vertex below w on the stack is
    // independent of how w was reached and may be reused for this target.
    if (low >= depth) {
      memo_[w] = p;
      low = INT_MAX;
    }
    return {p, low};
  }

  double combine(const sdg::Vertex& w, const std::vector<Group>& groups) const {
    auto group_p = [&](const sdg::EdgeLabel& label) {
      for (const auto& gr : groups) {
        if (gr.label == label) return gr.p;
      }
      return 0.0;
    };
    switch (w.control) {
      case sdg::ControlKind::None:
        // Entry, statement or call site: all successors share the Always label.
        return group_p(sdg::EdgeLabel::always());
      case sdg::ControlKind::IfLeaf: {
        const double p_true = branch_probability(w, sdg::EdgeLabel::on(true), model_);
        const double p_false = branch_probability(w, sdg::EdgeLabel::on(false), model_);
        return p_true * group_p(sdg::EdgeLabel::on(true)) +
               p_false * group_p(sdg::EdgeLabel::on(false));
      }
      case sdg::ControlKind::SwitchHead: {
        double sum = 0.0;
        for (const auto& gr : groups) sum += gr.p;
        return sum / static_cast<double>(w.arity);
      }
      case sdg::ControlKind::LoopCond: {
        // The body runs at least once; the loop also leaves through its exit
        // edge, so both groups are taken.
        const double body =
            branch_probability(w, sdg::EdgeLabel::on(true), model_) * group_p(sdg::EdgeLabel::on(true));
        const double exit = group_p(sdg::EdgeLabel::on(false));
        return body + exit - body * exit;
      }
    }
    return 0.0;
  }

  const sdg::Sdg& g_;
  const BranchModel& model_;
  VertexId target_;
  const sdg::Membership& region_;
  std::vector<int> on_stack_;
  std::vector<double> memo_;
};

inline double clamp_probability(double p) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) {
    throw AnalysisError("likelihood out of range: " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace detail

/// Demand-driven execution likelihood over one immutable SDG.
///
/// For a target v in function f the likelihood factors into the probability
/// of reaching f's entry from the start (computed once per start, entry and
/// model, and kept for later queries) times the probability of reaching v
/// from f's entry. Within a single traversal p_{w,v} is memoized; nothing
/// else survives between queries, so a batch and a series of fresh single
/// queries produce identical bits. Queries may run concurrently.
class LikelihoodEngine {
 public:
  explicit LikelihoodEngine(const sdg::Sdg& g) : g_(g) {}

  VertexId default_start() const {
    if (!g_.entry) throw AnalysisError("program has no entry function");
    return *g_.entry;
  }

  LikelihoodResult query(const LikelihoodQuery& q) {
    const VertexId start = q.start.value_or(default_start());
    sdg::check_vertex(g_, start);
    sdg::check_vertex(g_, q.target);

    LikelihoodResult r;
    r.vertex = q.target;
    r.model = q.model.kind;
    r.start = start;

    const auto& reach = reach_from(start);
    if (!reach[q.target]) {
      r.unreachable = true;
      return r;
    }
    if (q.target == start) {
      r.likelihood = 1.0;
      return r;
    }

    const auto& target_v = g_.vertex(q.target);
    if (target_v.function == g_.vertex(start).function) {
      r.likelihood = detail::clamp_probability(transition(start, q.target, q.model, reach));
      return r;
    }
    const VertexId entry = g_.entry_of(q.target);
    const double to_entry = entry_likelihood(start, entry, q.model);
    const double within =
        q.target == entry ? 1.0 : transition(entry, q.target, q.model, reach_from(entry));
    r.likelihood = detail::clamp_probability(to_entry * within);
    return r;
  }

  LikelihoodResult query(VertexId target, VertexId start, const BranchModel& model) {
    return query(LikelihoodQuery{target, start, model});
  }

  /// Same results as calling query() per target, in target order. With
  /// jobs > 1 the targets are spread over worker threads.
  std::vector<LikelihoodResult> batch(std::span<const VertexId> targets, VertexId start,
                                      const BranchModel& model, unsigned jobs = 1) {
    std::vector<LikelihoodResult> out(targets.size());
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(targets.size())));
    if (jobs <= 1) {
      for (std::size_t i = 0; i < targets.size(); ++i) out[i] = query(targets[i], start, model);
      return out;
    }
    // Surface the first error from any worker on the calling thread.
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned k = 0; k < jobs; ++k) {
      workers.emplace_back([&, k] {
        try {
          for (std::size_t i = k; i < targets.size(); i += jobs) {
            out[i] = query(targets[i], start, model);
          }
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return out;
  }

  /// Probability of reaching `entry` from `start`; memoized across queries.
  double entry_likelihood(VertexId start, VertexId entry, const BranchModel& model) {
    const Key key{start, entry, model};
    {
      std::lock_guard lock(mu_);
      if (auto it = entry_cache_.find(key); it != entry_cache_.end()) return it->second;
    }
    const auto& reach = reach_from(start);
    const double p =
        !reach[entry] ? 0.0
                      : (entry == start ? 1.0
                                        : detail::clamp_probability(
                                              transition(start, entry, model, reach)));
    std::lock_guard lock(mu_);
    entry_cache_.emplace(key, p);
    return p;
  }

  std::size_t cached_entries() const {
    std::lock_guard lock(mu_);
    return entry_cache_.size();
  }

 private:
  using Key = std::tuple<VertexId, VertexId, BranchModel>;

  const sdg::Membership& reach_from(VertexId v) {
    std::lock_guard lock(mu_);
    auto& slot = reach_cache_[v];
    if (!slot) slot = std::make_shared<const sdg::Membership>(sdg::forward_reach(g_, v));
    return *slot;
  }

  double transition(VertexId source, VertexId target, const BranchModel& model,
                    const sdg::Membership& forward) const {
    const sdg::Membership region = sdg::backward_reach(g_, target, &forward);
    if (!region[source]) return 0.0;
    detail::Traversal t(g_, model, target, region);
    return t.run(source);
  }

  const sdg::Sdg& g_;
  mutable std::mutex mu_;
  std::map<Key, double> entry_cache_;
  std::map<VertexId, std::shared_ptr<const sdg::Membership>> reach_cache_;
};

/// One query on a fresh engine.
inline LikelihoodResult execution_likelihood(const sdg::Sdg& g, const LikelihoodQuery& q) {
  LikelihoodEngine engine(g);
  return engine.query(q);
}

inline std::vector<LikelihoodResult> batch_likelihood(const sdg::Sdg& g,
                                                      std::span<const VertexId> targets,
                                                      std::optional<VertexId> start,
                                                      const BranchModel& model,
                                                      unsigned jobs = 1) {
  LikelihoodEngine engine(g);
  return engine.batch(targets, start.value_or(engine.default_start()), model, jobs);
}

}  // namespace elan::likelihood
