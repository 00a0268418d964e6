#include "offload/search_tree.hpp"

#include <algorithm>
#include <cmath>

#include "offload/error.hpp"

namespace offload {

std::uint32_t SearchTree::add_child(std::uint32_t parent, Decision decision, double q) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    SearchNode child;
    child.decision = decision;
    child.q = q;
    child.parent = static_cast<std::int32_t>(parent);
    nodes_.push_back(std::move(child));
    nodes_[parent].children.push_back(index);
    return index;
}

std::vector<std::uint32_t> SearchTree::path(std::uint32_t leaf) const {
    std::vector<std::uint32_t> out;
    for (std::int32_t i = static_cast<std::int32_t>(leaf); i >= 0; i = nodes_[static_cast<std::size_t>(i)].parent) {
        out.push_back(static_cast<std::uint32_t>(i));
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<Decision> SearchTree::path_decisions(std::uint32_t leaf) const {
    std::vector<Decision> out;
    for (std::uint32_t i : path(leaf)) {
        if (nodes_[i].decision) out.push_back(*nodes_[i].decision);
    }
    return out;
}

double ucb(const SearchNode& child, std::uint32_t parent_visits, double c) {
    return child.v + std::sqrt(c * std::log(static_cast<double>(parent_visits)) / child.n);
}

std::uint32_t select_leaf(const SearchTree& tree, double c) {
    std::uint32_t current = SearchTree::kRoot;
    while (true) {
        const SearchNode& node = tree.node(current);
        if (!node.expanded || node.children.empty()) return current;
        std::uint32_t best = node.children.front();
        double best_score = ucb(tree.node(best), node.n, c);
        for (std::size_t k = 1; k < node.children.size(); ++k) {
            const double s = ucb(tree.node(node.children[k]), node.n, c);
            if (s > best_score) {
                best_score = s;
                best = node.children[k];
            }
        }
        current = best;
    }
}

double rollout_value(std::span<const double> rewards, double lambda) {
    double weighted = 0.0;
    double weights = 0.0;
    double w = 1.0;
    for (double q : rewards) {
        weighted += w * q;
        weights += w;
        w *= lambda;
    }
    return weights > 0.0 ? weighted / weights : 0.0;
}

void update_node(SearchNode& node, double value) {
    ++node.n;
    node.v += (value - node.v) / node.n;
}

void propagate_value(SearchTree& tree, std::uint32_t leaf, double value) {
    for (std::uint32_t i : tree.path(leaf)) update_node(tree.node(i), value);
}

void backpropagate(SearchTree& tree, std::uint32_t leaf, std::span<const double> rewards, double lambda) {
    propagate_value(tree, leaf, rollout_value(rewards, lambda));
}

bool preferred(const SearchNode& a, const SearchNode& b) {
    if (a.n != b.n) return a.n > b.n;
    if (a.v != b.v) return a.v > b.v;
    const Decision da = a.decision.value_or(Decision{});
    const Decision db = b.decision.value_or(Decision{});
    if (da.task != db.task) return da.task < db.task;
    return da.host < db.host;
}

std::optional<std::uint32_t> discard_check(const SearchTree& tree, std::uint32_t m_iter) {
    std::optional<std::uint32_t> chosen;
    for (std::uint32_t c : tree.root().children) {
        const SearchNode& child = tree.node(c);
        if (child.real_visits() <= m_iter / 2) continue;
        if (!chosen || preferred(child, tree.node(*chosen))) chosen = c;
    }
    return chosen;
}

std::uint32_t best_child(const SearchTree& tree) {
    const auto& children = tree.root().children;
    if (children.empty()) throw Error("search tree has no children");
    std::uint32_t best = children.front();
    for (std::uint32_t c : children) {
        if (preferred(tree.node(c), tree.node(best))) best = c;
    }
    return best;
}

namespace {

/// Up to `width` distinct (task, host) pairs drawn uniformly without replacement.
std::vector<Decision> sample_decisions(std::span<const TaskId> tasks, std::uint32_t hosts, std::uint32_t width,
                                       Rng& rng) {
    const std::size_t space = tasks.size() * hosts;
    const std::size_t k = std::min<std::size_t>(width, space);
    std::vector<std::size_t> picks;
    picks.reserve(k);
    if (space <= 4 * k) {
        std::vector<std::size_t> all(space);
        for (std::size_t i = 0; i < space; ++i) all[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(all[i], all[i + rng.index(space - i)]);
            picks.push_back(all[i]);
        }
    } else {
        while (picks.size() < k) {
            const std::size_t x = rng.index(space);
            if (std::find(picks.begin(), picks.end(), x) == picks.end()) picks.push_back(x);
        }
    }
    std::vector<Decision> out;
    out.reserve(k);
    for (std::size_t x : picks) out.push_back({tasks[x / hosts], static_cast<HostId>(x % hosts)});
    return out;
}

std::vector<TaskId> without(std::span<const TaskId> tasks, std::span<const Decision> taken) {
    std::vector<TaskId> out;
    out.reserve(tasks.size());
    for (TaskId t : tasks) {
        const bool used = std::any_of(taken.begin(), taken.end(), [t](const Decision& d) { return d.task == t; });
        if (!used) out.push_back(t);
    }
    return out;
}

}  // namespace

TreeSearchResult search_decision(SearchEnvironment& env, std::span<const Decision> committed,
                                 std::span<const TaskId> remaining, std::uint32_t host_count,
                                 const MmctParams& params, bool discard, Rng& rng) {
    if (remaining.empty()) throw Error("nothing to search");
    if (host_count == 0) throw Error("no hosts");

    SearchTree tree;
    TreeSearchResult result;
    std::optional<std::uint32_t> early;

    for (std::uint32_t iter = 0; iter < params.iterations; ++iter) {
        const std::uint32_t leaf = select_leaf(tree, params.c);
        const std::vector<Decision> along = tree.path_decisions(leaf);
        std::vector<Decision> path(committed.begin(), committed.end());
        path.insert(path.end(), along.begin(), along.end());
        const std::vector<TaskId> unassigned = without(remaining, along);

        bool rolled = false;
        if (!tree.node(leaf).expanded) {
            tree.node(leaf).expanded = true;
            const auto decisions = sample_decisions(unassigned, host_count, params.expansion_width, rng);
            if (!decisions.empty()) {
                // Every new child gets its one-interval reward; only the best
                // of them is rolled out, so each iteration extends one path.
                std::uint32_t pick = 0;
                double pick_q = -1.0;
                for (const Decision& d : decisions) {
                    path.push_back(d);
                    const double q = env.immediate(path);
                    path.pop_back();
                    const std::uint32_t child = tree.add_child(leaf, d, q);
                    if (q > pick_q) {
                        pick_q = q;
                        pick = child;
                    }
                }
                const Decision d = *tree.node(pick).decision;
                path.push_back(d);
                const std::vector<Decision> one{d};
                const auto rest = without(unassigned, one);
                Rng stream = rng.split();
                const auto rewards = env.evaluate(path, rest, params.rollout_steps, stream);
                backpropagate(tree, pick, rewards, params.lambda);
                rolled = true;
            }
        }
        if (!rolled) {
            // Terminal: every task on this path is placed, only look ahead.
            Rng stream = rng.split();
            const auto rewards = env.evaluate(path, unassigned, params.rollout_steps, stream);
            backpropagate(tree, leaf, rewards, params.lambda);
        }

        ++result.iterations;
        if (discard) {
            early = discard_check(tree, params.iterations);
            if (early) break;
        }
    }

    const std::uint32_t chosen = early ? *early : best_child(tree);
    result.decision = *tree.node(chosen).decision;
    result.discarded = early.has_value();
    result.value = tree.node(chosen).v;
    result.root_visits = tree.root().n;
    return result;
}

}  // namespace offload
