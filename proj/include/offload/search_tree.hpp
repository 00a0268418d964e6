#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "offload/rng.hpp"
#include "offload/simcore.hpp"

namespace offload {

/// Look-ahead search knobs. Defaults: c = 0.5, N = 7 roll-out steps, M = 10
/// iterations, four children per expansion.
struct MmctParams {
    double c = 0.5;
    std::uint32_t rollout_steps = 7;
    std::uint32_t iterations = 10;
    std::uint32_t expansion_width = 4;
    double lambda = 0.9;
    // Commit one uniformly random decision before searching, i.e. treat the
    // randomly chosen root as an executed decision.
    bool commit_random_root = false;
};

/// Node tuple [(task, host), q, v, n]. The root carries no decision.
struct SearchNode {
    std::optional<Decision> decision;
    double q = 0.0;  // immediate reward
    double v = 0.0;  // long-term reward estimate
    std::uint32_t n = 1;
    std::vector<std::uint32_t> children;
    std::int32_t parent = -1;
    bool expanded = false;

    std::uint32_t real_visits() const { return n - 1; }
};

class SearchTree {
public:
    SearchTree() { nodes_.emplace_back(); }

    static constexpr std::uint32_t kRoot = 0;

    const SearchNode& node(std::uint32_t i) const { return nodes_[i]; }
    SearchNode& node(std::uint32_t i) { return nodes_[i]; }
    const SearchNode& root() const { return nodes_[kRoot]; }
    std::size_t size() const { return nodes_.size(); }

    std::uint32_t add_child(std::uint32_t parent, Decision decision, double q = 0.0);

    /// Node indices from the root down to `leaf`, inclusive.
    std::vector<std::uint32_t> path(std::uint32_t leaf) const;

    /// Decisions along the root-to-leaf path (the root contributes none).
    std::vector<Decision> path_decisions(std::uint32_t leaf) const;

private:
    std::vector<SearchNode> nodes_;
};

/// v_i + sqrt(c * ln(n_parent) / n_i).
double ucb(const SearchNode& child, std::uint32_t parent_visits, double c);

/// Descends by maximum UCB (ties to the earlier-created child) and returns the
/// first node that has not been expanded yet, or a terminal node.
std::uint32_t select_leaf(const SearchTree& tree, double c);

/// Discounted mean (sum lambda^d q_d) / (sum lambda^d) over q_0..q_N.
double rollout_value(std::span<const double> rewards, double lambda);

/// n += 1; v moves toward `value` as an incremental mean.
void update_node(SearchNode& node, double value);

/// Applies one roll-out value to every node on the root-to-leaf path.
void propagate_value(SearchTree& tree, std::uint32_t leaf, double value);

void backpropagate(SearchTree& tree, std::uint32_t leaf, std::span<const double> rewards, double lambda);

/// True when `a` should be committed over `b`: more visits, then higher v,
/// then lower task id, then lower host id.
bool preferred(const SearchNode& a, const SearchNode& b);

/// Depth-1 child whose real visits exceed floor(M/2), if any.
std::optional<std::uint32_t> discard_check(const SearchTree& tree, std::uint32_t m_iter);

/// Most visited depth-1 child. Requires at least one child.
std::uint32_t best_child(const SearchTree& tree);

/// Source of rewards for the search; the simulator-backed implementation
/// lives with the schedulers, tests substitute scripted ones.
class SearchEnvironment {
public:
    virtual ~SearchEnvironment() = default;

    /// Rewards q_0..q_steps: q_0 for executing `path` in the current interval,
    /// then one per look-ahead interval that places a random `unassigned` task.
    virtual std::vector<double> evaluate(std::span<const Decision> path, std::span<const TaskId> unassigned,
                                         std::uint32_t steps, Rng& rng) = 0;

    /// q for executing `path` in the current interval only.
    virtual double immediate(std::span<const Decision> path) {
        Rng unused(0);
        return evaluate(path, {}, 0, unused).front();
    }
};

struct TreeSearchResult {
    Decision decision;
    std::uint32_t iterations = 0;
    bool discarded = false;
    double value = 0.0;
    std::uint32_t root_visits = 0;
};

/// Builds one tree over `remaining` x [0, host_count) on top of the already
/// `committed` decisions and returns the decision to commit next.
TreeSearchResult search_decision(SearchEnvironment& env, std::span<const Decision> committed,
                                 std::span<const TaskId> remaining, std::uint32_t host_count,
                                 const MmctParams& params, bool discard, Rng& rng);

}  // namespace offload
