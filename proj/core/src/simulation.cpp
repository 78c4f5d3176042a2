#include "wbft/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <stdexcept>

#include "wbft/channel.hpp"

// The engine runs in two passes.
//
// Logic pass: requests are resolved in index order. Each consensus round
// (attempt) draws its clustering, weights, faults and losses from addressed
// randomness and the initiators' current views, applies the per-round
// recalibration, and emits a script of attempt outcomes. Nothing here
// depends on simulated time, so two runs that differ only in scheduling
// (pipeline on/off, sequential vs parallel chains) agree on every outcome.
//
// Timing pass: the scripts are played through the discrete-event network:
// per-phase slotted windows, exponential retry backoff, pipeline gating,
// per-chain commit serialization, block dissemination with channel loss and
// the quiescence recovery sweep.

namespace wbft {
namespace {

constexpr std::uint64_t kTagAttemptStart = 1;
constexpr std::uint64_t kTagPrepareTally = 2;
constexpr std::uint64_t kTagCommitTally = 3;

std::uint64_t pack_tag(std::uint64_t kind, std::uint64_t request) {
    return kind | (request << 3);
}

struct AttemptScript {
    NodeId leader{};
    std::uint32_t participants = 0;
    std::uint64_t messages = 0;
    bool leader_silent = false; // no proposal at all; pure timeout window
    bool prepare_ok = false;
    bool success = false;
};

struct RequestScript {
    NodeId entry{};
    std::vector<AttemptScript> attempts;
    bool success = false;
    std::optional<Proof> proof; // the committing attempt's proof
    CompositeWeights weights;   // weights that proof was tallied under
    Bytes payload;              // committed response content
};

struct TaskRuntime {
    std::uint64_t idx = 0;
    std::uint32_t attempt = 0;

    bool started = false;
    bool commit_phase_entered = false; // pipeline gate for the successor
    bool proof_ready = false;          // waiting for commit gate / chain lock
    bool committing = false;
    bool done = false;

    Ticks not_before = 0;   // backoff eligibility
    Ticks active_ticks = 0; // consensus-active time; queue/gate waits excluded
    Digest committed{};
};

struct Line {
    std::vector<std::uint64_t> requests;
};

class Engine {
public:
    explicit Engine(const ScenarioInstance& instance)
        : inst_(instance), cfg_(instance.config), n_(cfg_.node_count()),
          field_(instance.seed),
          net_(instance.seed, instance.p_l,
               Ticks(std::llround(instance.slot_seconds / cfg_.sim.tick_seconds)),
               cfg_.sim.delivery_jitter_ticks) {
        clock_.tick_seconds = cfg_.sim.tick_seconds;
        slot_ = net_.slot_ticks();
        if (slot_ <= 0) throw ValidationError("sim: slot shorter than one tick");
        backoff_base_ = cfg_.consensus.retry_base_ticks > 0 ? cfg_.consensus.retry_base_ticks
                                                            : 2 * slot_;
        build_profiles();
        build_views();
        if (inst_.mode == ConsensusMode::abc_pbft) build_static_subset();
    }

    ScenarioResult run();
    HscSnapshot snapshot(NodeId entry);

private:
    const ScenarioInstance& inst_;
    const ScenarioConfig& cfg_;
    std::uint32_t n_;
    RandomField field_;
    Network net_;
    SimClock clock_;
    Ticks slot_ = 0;
    Ticks backoff_base_ = 0;

    KeyedHashCrypto crypto_;
    KeyDirectory keys_;
    std::vector<LlmProfile> profiles_;
    std::vector<WeightState> views_;
    std::map<NodeId, double> initial_trust_;
    std::vector<NodeId> byzantine_;
    std::vector<NodeId> static_subset_;

    // Logic pass products.
    std::vector<RequestScript> scripts_;
    std::vector<StoredProof> proofs_;

    // Timing pass state.
    EventQueue queue_;
    std::vector<TaskRuntime> tasks_;
    std::vector<Line> lines_;
    std::map<NodeId, LedgerSet> replicas_;
    std::map<NodeId, std::map<NodeId, std::map<std::uint64_t, Block>>> pending_;
    Ticks makespan_ = 0;
    std::uint64_t recovery_messages_ = 0;

    const LlmProfile& profile(NodeId id) const { return profiles_[id.value]; }

    ByzantineBehavior active_behavior(std::uint64_t request, NodeId node) const {
        const LlmProfile& p = profile(node);
        if (p.honest()) return ByzantineBehavior::none;
        if (p.activation_prob < 1.0 &&
            field_.uniform(rng_tag("byz-activation"), request, node.value) >=
                p.activation_prob)
            return ByzantineBehavior::none;
        return p.behavior_for_round(request);
    }

    double quality_of(std::uint64_t request, NodeId node) const {
        return sample_response_quality(profile(node), field_, request);
    }

    void build_profiles();
    void build_views();
    void build_static_subset();
    void build_lines();

    NodeId entry_for(std::uint64_t request) const;
    Clustering cluster_from_view(NodeId initiator, std::uint64_t request,
                                 std::uint32_t attempt) const;
    NodeId initial_leader(std::uint64_t request, NodeId entry) const;
    std::vector<NodeId> participants_for(NodeId leader, std::uint64_t request,
                                         std::uint32_t attempt) const;
    NodeId reroute(NodeId leader, std::uint64_t request, std::uint32_t attempt) const;

    void build_scripts();
    AttemptScript run_logic_attempt(std::uint64_t request, std::uint32_t attempt,
                                    NodeId leader, RequestScript& script,
                                    bool& leader_fault);

    // Timing pass.
    bool start_gate(const Line& line, std::size_t pos) const;
    bool commit_gate(const Line& line, std::size_t pos) const;
    void try_advance();
    void schedule_attempt(TaskRuntime& task, Ticks at);
    void on_attempt_start(TaskRuntime& task, Ticks now);
    void on_prepare_tally(TaskRuntime& task, Ticks now);
    void begin_commit(TaskRuntime& task, Ticks now);
    void on_commit_tally(TaskRuntime& task, Ticks now);
    void fail_attempt(TaskRuntime& task, Ticks now);
    void finish_task(TaskRuntime& task, Ticks now, bool success);
    void disseminate_block(const TaskRuntime& task, const Block& block, Ticks now);
    void replica_apply(NodeId node, const Block& block);
    void drain_pending(NodeId node, NodeId leader);
    void final_sync();

    const AttemptScript& attempt_of(const TaskRuntime& task) const {
        return scripts_[task.idx].attempts[task.attempt];
    }
};

// ---- setup ----------------------------------------------------------------

void Engine::build_profiles() {
    std::vector<double> raw;
    TrustWeights sampled =
        sample_trust_weights(n_, cfg_.trust.mean, cfg_.trust.variance, inst_.seed, raw);
    for (std::uint32_t i = 0; i < n_; ++i) {
        NodeId id{i};
        const NodeSpec& spec = cfg_.nodes[i];
        double t = spec.trust ? *spec.trust : sampled.b.at(id);
        initial_trust_[id] = std::clamp(t, 1e-6, 1.0 - 1e-6);
    }

    std::vector<std::uint32_t> byz_picks;
    if (cfg_.byzantine.count > 0) {
        std::vector<std::uint32_t> order(n_);
        for (std::uint32_t i = 0; i < n_; ++i) order[i] = i;
        switch (cfg_.byzantine.assignment) {
            case ByzantineAssignment::fixed:
                break;
            case ByzantineAssignment::random: {
                SplitMix rng(field_.stream(rng_tag("byz-pick")));
                for (std::uint32_t i = n_; i > 1; --i)
                    std::swap(order[i - 1], order[std::uint32_t(rng.below(i))]);
                break;
            }
            case ByzantineAssignment::lowest_trust:
                std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
                    return initial_trust_[NodeId{a}] < initial_trust_[NodeId{b}];
                });
                break;
            case ByzantineAssignment::highest_trust:
                std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
                    return initial_trust_[NodeId{a}] > initial_trust_[NodeId{b}];
                });
                break;
        }
        byz_picks.assign(order.begin(), order.begin() + cfg_.byzantine.count);
    }

    for (std::uint32_t i = 0; i < n_; ++i) {
        NodeId id{i};
        const NodeSpec& spec = cfg_.nodes[i];
        LlmProfile p;
        p.node = id;
        p.name = spec.name;
        p.quality_mean = spec.quality_mean;
        p.quality_stddev = spec.quality_stddev;
        p.trust_param = initial_trust_[id];
        p.behaviors = spec.behaviors;
        if (std::find(byz_picks.begin(), byz_picks.end(), i) != byz_picks.end() &&
            p.behaviors.empty())
            p.behaviors = cfg_.byzantine.behaviors;
        p.cycle_behaviors = cfg_.byzantine.cycle;
        p.activation_prob = cfg_.byzantine.activation_prob;
        p.keys = make_key_ring(crypto_, id, inst_.seed);
        keys_.register_node(id, p.keys);
        if (!p.behaviors.empty()) byzantine_.push_back(id);
        profiles_.push_back(std::move(p));
        replicas_.emplace(id, LedgerSet{});
    }
}

void Engine::build_views() {
    // Initial quality scores: capability means through the standardization
    // pipeline; identical means degenerate to a uniform 0.5 score.
    std::map<NodeId, double> quality;
    bool degenerate = true;
    for (std::uint32_t i = 1; i < n_; ++i)
        if (profiles_[i].quality_mean != profiles_[0].quality_mean) degenerate = false;
    if (degenerate) {
        for (std::uint32_t i = 0; i < n_; ++i) quality[NodeId{i}] = 0.5;
    } else {
        ScoreMatrix m;
        std::vector<double> row;
        for (std::uint32_t i = 0; i < n_; ++i) {
            m.nodes.push_back(NodeId{i});
            row.push_back(profiles_[i].quality_mean);
        }
        m.rows.push_back(row);
        quality = standardize_scores(m);
    }
    for (std::uint32_t i = 0; i < n_; ++i) {
        (void)i;
        views_.emplace_back(quality, initial_trust_, cfg_.consensus.alpha, cfg_.consensus.beta);
    }
}

void Engine::build_static_subset() {
    // Reliable-node baseline: half the network, picked once by initial trust
    // and never re-selected.
    std::uint32_t k = (n_ + 1) / 2;
    std::vector<NodeId> order;
    for (std::uint32_t i = 0; i < n_; ++i) order.push_back(NodeId{i});
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        double ta = initial_trust_.at(a), tb = initial_trust_.at(b);
        if (ta != tb) return ta > tb;
        return a < b;
    });
    static_subset_.assign(order.begin(), order.begin() + k);
    std::sort(static_subset_.begin(), static_subset_.end());
}

void Engine::build_lines() {
    if (!mode_parallel_chains(inst_.mode)) {
        lines_.resize(1);
        for (std::uint64_t r = 0; r < cfg_.workload.requests; ++r)
            lines_[0].requests.push_back(r);
        return;
    }
    // One queue per chain: requests line up at the leader that ultimately
    // commits them, so appends on a chain serialize through the line gates
    // and heights grow in order even with the pipeline overlapping phases.
    lines_.resize(n_);
    for (std::uint64_t r = 0; r < cfg_.workload.requests; ++r)
        lines_[scripts_[r].attempts.back().leader.value].requests.push_back(r);
}

NodeId Engine::entry_for(std::uint64_t request) const {
    switch (cfg_.workload.entry_policy) {
        case EntryPolicy::round_robin: return NodeId{std::uint32_t(request % n_)};
        case EntryPolicy::random:
            return NodeId{std::uint32_t(field_.value(rng_tag("entry"), request) % n_)};
        case EntryPolicy::fixed: return cfg_.workload.fixed_entry;
    }
    return NodeId{0};
}

Clustering Engine::cluster_from_view(NodeId initiator, std::uint64_t request,
                                     std::uint32_t attempt) const {
    // Per-round measured latencies plus the initiator's current trust vector;
    // both fluctuate between rounds, so the clustering does too.
    std::map<NodeId, double> latency;
    for (std::uint32_t j = 0; j < n_; ++j) {
        double u = field_.uniform(rng_tag("latency"), request, attempt,
                                  initiator.value * std::uint64_t(n_) + j);
        latency[NodeId{j}] = inst_.slot_seconds * (1.0 + cfg_.sim.latency_jitter * u);
    }
    const auto& trust = views_[initiator.value].trust_scores();
    return run_hsc(trust, latency, cfg_.hsc,
                   field_.value(rng_tag("hsc"), request, attempt, initiator.value));
}

NodeId Engine::initial_leader(std::uint64_t request, NodeId entry) const {
    switch (inst_.mode) {
        case ConsensusMode::wbft:
        case ConsensusMode::wbft_unweighted: {
            // The entry node clusters first and routes the request to its
            // cluster's CCN, which becomes the consensus initiator.
            Clustering clustering = cluster_from_view(entry, request, 0);
            return clustering.is_ccn(entry) ? entry
                                            : clustering.ccns[clustering.assignment.at(entry)];
        }
        case ConsensusMode::wbft_no_hsc:
        case ConsensusMode::pbft:
        case ConsensusMode::vaap:
            return entry;
        case ConsensusMode::abc_pbft:
            return static_subset_[entry.value % static_subset_.size()];
    }
    return entry;
}

std::vector<NodeId> Engine::participants_for(NodeId leader, std::uint64_t request,
                                             std::uint32_t attempt) const {
    std::vector<NodeId> out;
    switch (inst_.mode) {
        case ConsensusMode::wbft:
        case ConsensusMode::wbft_unweighted: {
            Clustering clustering = cluster_from_view(leader, request, attempt);
            out = clustering.ccns;
            if (!clustering.is_ccn(leader)) out.push_back(leader);
            std::sort(out.begin(), out.end());
            break;
        }
        case ConsensusMode::wbft_no_hsc:
        case ConsensusMode::pbft:
        case ConsensusMode::vaap:
            for (std::uint32_t j = 0; j < n_; ++j) out.push_back(NodeId{j});
            break;
        case ConsensusMode::abc_pbft:
            out = static_subset_;
            break;
    }
    return out;
}

NodeId Engine::reroute(NodeId leader, std::uint64_t request, std::uint32_t attempt) const {
    std::uint32_t pool =
        inst_.mode == ConsensusMode::abc_pbft ? std::uint32_t(static_subset_.size()) : n_;
    auto nth = [&](std::uint32_t i) {
        return inst_.mode == ConsensusMode::abc_pbft ? static_subset_[i] : NodeId{i};
    };
    std::uint32_t cur = 0;
    for (std::uint32_t i = 0; i < pool; ++i)
        if (nth(i) == leader) cur = i;
    switch (cfg_.consensus.leader_policy) {
        case RetryLeaderPolicy::same: return leader;
        case RetryLeaderPolicy::next: return nth((cur + 1) % pool);
        case RetryLeaderPolicy::random:
            return nth(std::uint32_t(field_.value(rng_tag("leader-pick"), request, attempt) %
                                     pool));
    }
    return leader;
}

// ---- logic pass ------------------------------------------------------------

AttemptScript Engine::run_logic_attempt(std::uint64_t request, std::uint32_t attempt,
                                        NodeId leader, RequestScript& script,
                                        bool& leader_fault) {
    AttemptScript out;
    out.leader = leader;
    leader_fault = false;

    std::vector<NodeId> participants = participants_for(leader, request, attempt);
    out.participants = std::uint32_t(participants.size());
    if (script.entry != leader) ++out.messages; // access-point relay

    std::map<NodeId, RoundEvidence> leader_evidence;   // leader's view of voters
    std::map<NodeId, RoundEvidence> follower_evidence; // voters' views of the leader

    auto finish_evidence = [&]() {
        views_[leader.value].recalibrate(leader_evidence, cfg_.recalibration);
        for (const auto& [voter, ev] : follower_evidence) {
            std::map<NodeId, RoundEvidence> about_leader;
            about_leader[leader] = ev;
            views_[voter.value].recalibrate(about_leader, cfg_.recalibration);
        }
    };

    ByzantineBehavior leader_behavior = active_behavior(request, leader);
    if (leader_behavior == ByzantineBehavior::silent) {
        // Nothing proposed; the entry node times the initiator out.
        std::map<NodeId, RoundEvidence> about_leader;
        about_leader[leader].silent = true;
        views_[script.entry.value].recalibrate(about_leader, cfg_.recalibration);
        out.leader_silent = true;
        leader_fault = true;
        return out;
    }

    double leader_quality = quality_of(request, leader);
    Bytes query = generate_response(script.entry, request, 0.0); // stands in for Q
    std::uint64_t height = 0; // heights materialize at commit in the timing pass
    PreparePayload payload = leader_prepare(profile(leader), std::move(query), request, height,
                                            leader_quality, crypto_);
    if (leader_behavior == ByzantineBehavior::fake_response) {
        auto mutated =
            byzantine_mutate(MessageBody{payload}, leader_behavior, profile(leader), crypto_);
        payload = std::get<PreparePayload>(*mutated);
    }

    RoundState round;
    round.payload = payload;
    round.retry_count = attempt;

    for (NodeId voter : participants) {
        if (voter == leader) continue;
        ++out.messages;
        LinkAddress down{request, attempt, kStagePrepareDown, leader, voter};
        if (!net_.link_up(down)) {
            leader_evidence[voter].silent = true;
            continue;
        }
        double own_quality = quality_of(request, voter);
        auto vote = follower_on_prepare(payload, profile(voter), own_quality, leader_quality,
                                        crypto_, keys_);
        if (!vote) {
            // Invalid data detected: discard silently, flag the leader.
            follower_evidence[voter].caught_invalid = true;
            leader_evidence[voter].silent = true;
            continue;
        }
        follower_evidence[voter].participated = true;
        ByzantineBehavior behavior = active_behavior(request, voter);
        if (behavior != ByzantineBehavior::none) {
            auto mutated =
                byzantine_mutate(MessageBody{*vote}, behavior, profile(voter), crypto_);
            if (!mutated) {
                leader_evidence[voter].silent = true;
                continue;
            }
            if (auto* v = std::get_if<VoteMsg>(&*mutated)) *vote = *v;
        }
        ++out.messages;
        LinkAddress up{request, attempt, kStagePrepareUp, voter, leader};
        if (net_.link_up(up)) {
            round.votes.push_back(*vote);
        } else {
            leader_evidence[voter].silent = true;
        }
    }

    if (inst_.mode == ConsensusMode::pbft) {
        // Classical middle stage: every consensus node floods its prepare to
        // every other; counted, not individually simulated.
        out.messages += std::uint64_t(out.participants) * (out.participants - 1);
    }

    CompositeWeights weights =
        mode_weighted(inst_.mode) ? views_[leader.value].weights_over(participants)
                                  : equal_weights(participants);
    double leader_weight = weights.at(leader);

    for (const VoteMsg& vote : round.votes) {
        RoundEvidence& ev = leader_evidence[vote.voter];
        if (!verify_vote(vote, crypto_, keys_)) {
            ev.caught_invalid = true;
            continue;
        }
        ev.participated = true;
        ev.silent = false;
        double q = quality_of(request, vote.voter);
        if (q > leader_quality) ev.quality_outcome = 1;
        else if (q < leader_quality) ev.quality_outcome = -1;
        std::uint8_t expected = (q <= leader_quality) ? 1 : 0;
        if (vote.value != expected) ev.contradicted = true;
    }

    auto proof = leader_tally_prepare(round, weights, leader_weight, crypto_, keys_);
    if (!proof) {
        for (const auto& [id, ev] : follower_evidence)
            if (ev.caught_invalid && profile(id).honest()) leader_fault = true;
        finish_evidence();
        return out;
    }
    out.prepare_ok = true;

    Proof broadcast = *proof;
    if (leader_behavior == ByzantineBehavior::invalid_proof) {
        auto mutated = byzantine_mutate(MessageBody{broadcast}, leader_behavior,
                                        profile(leader), crypto_);
        broadcast = std::get<Proof>(*mutated);
    }

    for (NodeId voter : participants) {
        if (voter == leader) continue;
        ++out.messages;
        LinkAddress down{request, attempt, kStageCommitDown, leader, voter};
        if (!net_.link_up(down)) {
            leader_evidence[voter].silent = true;
            continue;
        }
        if (follower_evidence[voter].caught_invalid) continue; // still distrusts the leader

        std::optional<Proof> retained; // previous-height proof stand-in
        auto outcome =
            follower_on_proof(broadcast, weights, profile(voter), crypto_, keys_, retained);
        if (outcome.leader_flagged) {
            follower_evidence[voter].caught_invalid = true;
            continue;
        }
        follower_evidence[voter].participated = true;
        double q_f = quality_of(request, voter);
        if (leader_quality > q_f) follower_evidence[voter].quality_outcome = 1;
        else if (leader_quality < q_f) follower_evidence[voter].quality_outcome = -1;

        CommitConfirm confirm = *outcome.confirm;
        ByzantineBehavior behavior = active_behavior(request, voter);
        if (behavior != ByzantineBehavior::none) {
            auto mutated =
                byzantine_mutate(MessageBody{confirm}, behavior, profile(voter), crypto_);
            if (!mutated) continue;
            if (auto* c = std::get_if<CommitConfirm>(&*mutated)) confirm = *c;
        }
        ++out.messages;
        LinkAddress up{request, attempt, kStageCommitUp, voter, leader};
        if (net_.link_up(up)) round.confirms.push_back(confirm);
    }

    bool quorum =
        leader_tally_commit(round.confirms, weights, leader_weight, crypto_, keys_);
    for (const auto& [id, ev] : follower_evidence)
        if (ev.caught_invalid && profile(id).honest()) leader_fault = true;
    finish_evidence();

    if (quorum) {
        out.success = true;
        script.proof = *proof;
        script.weights = weights;
        script.payload = payload.response;
    }
    return out;
}

void Engine::build_scripts() {
    scripts_.resize(cfg_.workload.requests);
    for (std::uint64_t r = 0; r < cfg_.workload.requests; ++r) {
        RequestScript& script = scripts_[r];
        script.entry = entry_for(r);
        NodeId leader = initial_leader(r, script.entry);
        bool leader_fault = false;
        for (std::uint32_t attempt = 0;; ++attempt) {
            AttemptScript a = run_logic_attempt(r, attempt, leader, script, leader_fault);
            script.attempts.push_back(a);
            if (a.success) {
                script.success = true;
                if (cfg_.sim.retain_proofs)
                    proofs_.push_back(StoredProof{*script.proof, script.weights});
                break;
            }
            if (attempt >= cfg_.consensus.retry_max) break;
            if (leader_fault) leader = reroute(leader, r, attempt + 1);
        }
    }
}

// ---- timing pass -----------------------------------------------------------

bool Engine::start_gate(const Line& line, std::size_t pos) const {
    if (pos == 0) return true;
    const TaskRuntime& prev = tasks_[line.requests[pos - 1]];
    if (prev.done) return true;
    bool pipelined = cfg_.consensus.pipeline && mode_supports_pipeline(inst_.mode);
    return pipelined && prev.commit_phase_entered;
}

bool Engine::commit_gate(const Line& line, std::size_t pos) const {
    if (pos == 0) return true;
    return tasks_[line.requests[pos - 1]].done;
}

void Engine::try_advance() {
    for (Line& line : lines_) {
        std::size_t first_open = 0;
        while (first_open < line.requests.size() && tasks_[line.requests[first_open]].done)
            ++first_open;
        // Depth-1 pipeline: only the head and its successor can be live.
        for (std::size_t pos = first_open;
             pos < line.requests.size() && pos <= first_open + 1; ++pos) {
            TaskRuntime& task = tasks_[line.requests[pos]];
            if (task.done) continue;
            if (!task.started && start_gate(line, pos)) {
                task.started = true;
                schedule_attempt(task, std::max(clock_.now, task.not_before));
            }
            if (task.proof_ready && !task.committing && commit_gate(line, pos))
                begin_commit(task, clock_.now);
        }
    }
}

void Engine::schedule_attempt(TaskRuntime& task, Ticks at) {
    queue_.push_timer(at, attempt_of(task).leader, pack_tag(kTagAttemptStart, task.idx));
}

void Engine::on_attempt_start(TaskRuntime& task, Ticks now) {
    if (task.done) return;
    const AttemptScript& script = attempt_of(task);
    const Ticks window = Ticks(script.participants) * slot_;
    if (script.leader_silent) {
        // No proposal ever goes out; one timeout window elapses.
        task.active_ticks += window;
        fail_attempt(task, now + window);
        return;
    }
    queue_.push_timer(now + window, script.leader, pack_tag(kTagPrepareTally, task.idx));
}

void Engine::on_prepare_tally(TaskRuntime& task, Ticks now) {
    if (task.done) return;
    const AttemptScript& script = attempt_of(task);
    task.active_ticks += Ticks(script.participants) * slot_;
    if (!script.prepare_ok) {
        fail_attempt(task, now);
        return;
    }
    if (!script.success) {
        // This commit phase is going to fail and appends nothing, so it does
        // not wait for the chain-order gate.
        task.commit_phase_entered = true;
        begin_commit(task, now);
        return;
    }
    task.proof_ready = true;
    task.commit_phase_entered = true; // unblocks a pipelined successor
    try_advance();
}

void Engine::begin_commit(TaskRuntime& task, Ticks now) {
    task.committing = true;
    task.proof_ready = false;
    const AttemptScript& script = attempt_of(task);
    queue_.push_timer(now + Ticks(script.participants) * slot_, script.leader,
                      pack_tag(kTagCommitTally, task.idx));
}

void Engine::on_commit_tally(TaskRuntime& task, Ticks now) {
    if (task.done) return;
    const AttemptScript& script = attempt_of(task);
    task.active_ticks += Ticks(script.participants) * slot_;
    task.committing = false;

    if (!script.success) {
        fail_attempt(task, now);
        return;
    }

    Chain& chain = replicas_.at(script.leader).chain_for(script.leader);
    Block block;
    block.leader = script.leader;
    block.height = chain.next_height();
    block.round = task.idx;
    block.prev_hash = chain.tip_digest();
    block.response = scripts_[task.idx].payload;
    block.response_hash = digest(block.response);
    block.timestamp = now;
    if (chain.append(block) != AppendError::none)
        throw std::logic_error("commit produced an unappendable block");
    task.committed = block_digest(block);

    disseminate_block(task, block, now);
    finish_task(task, now, true);
}

void Engine::fail_attempt(TaskRuntime& task, Ticks now) {
    if (task.attempt + 1 >= scripts_[task.idx].attempts.size()) {
        finish_task(task, now, false);
        return;
    }
    ++task.attempt;
    Ticks backoff = retry_backoff(backoff_base_, task.attempt);
    task.active_ticks += backoff;
    task.not_before = now + backoff;
    schedule_attempt(task, task.not_before);
}

void Engine::finish_task(TaskRuntime& task, Ticks now, bool success) {
    task.done = true;
    (void)success;
    makespan_ = std::max(makespan_, now);
    try_advance();
}

void Engine::disseminate_block(const TaskRuntime& task, const Block& block, Ticks now) {
    for (std::uint32_t j = 0; j < n_; ++j) {
        NodeId node{j};
        if (node == block.leader) continue;
        LinkAddress addr{task.idx, task.attempt, kStageDissemination, block.leader, node};
        net_.deliver(queue_, addr, now + slot_, MessageBody{block});
    }
}

void Engine::replica_apply(NodeId node, const Block& block) {
    if (digest(block.response) != block.response_hash) return;
    pending_[node][block.leader][block.height] = block;
    drain_pending(node, block.leader);
}

void Engine::drain_pending(NodeId node, NodeId leader) {
    Chain& chain = replicas_.at(node).chain_for(leader);
    auto& heights = pending_[node][leader];
    while (true) {
        auto it = heights.find(chain.next_height());
        if (it == heights.end()) break;
        if (chain.append(it->second) != AppendError::none) {
            heights.erase(it);
            break;
        }
        heights.erase(it);
    }
}

void Engine::final_sync() {
    // Quiescence repair: every node pulls the blocks it missed via the
    // GetData / TxResponse recovery path, digest-checked before appending.
    for (std::uint32_t leader_idx = 0; leader_idx < n_; ++leader_idx) {
        NodeId leader{leader_idx};
        const Chain& canonical = replicas_.at(leader).chain_for(leader);
        if (canonical.empty()) continue;
        for (std::uint32_t j = 0; j < n_; ++j) {
            NodeId node{j};
            if (node == leader) continue;
            Chain& mine = replicas_.at(node).chain_for(leader);
            while (mine.next_height() < canonical.next_height()) {
                const Block& want = canonical.blocks()[mine.next_height()];
                std::vector<TxOffer> offers;
                // A Byzantine holder serves a corrupted payload first; the
                // digest check rejects it and the scan moves on.
                if (!profile(leader).honest()) {
                    Bytes bad = want.response;
                    if (!bad.empty()) bad[0] ^= 0xff;
                    offers.push_back(
                        make_tx_offer(leader, bad, profile(leader).keys.follower.sec, crypto_));
                }
                offers.push_back(make_tx_offer(leader, want.response,
                                               profile(leader).keys.follower.sec, crypto_));
                recovery_messages_ += 2; // GetData + TxResponse
                auto payload = recover_transaction(want.response_hash, offers, crypto_, keys_);
                if (!payload) break;
                Block repaired = want;
                repaired.response = *payload;
                if (mine.append(repaired) != AppendError::none) break;
            }
        }
    }
}

ScenarioResult Engine::run() {
    build_scripts();
    build_lines();

    tasks_.resize(cfg_.workload.requests);
    for (std::uint64_t r = 0; r < cfg_.workload.requests; ++r) tasks_[r].idx = r;
    try_advance();

    while (auto event = queue_.pop()) {
        clock_.now = event->at;
        makespan_ = std::max(makespan_, event->at);
        if (event->kind == EventKind::deliver) {
            if (auto* block = std::get_if<Block>(&event->body))
                replica_apply(event->to, *block);
            continue;
        }
        TaskRuntime& task = tasks_[event->tag >> 3];
        switch (event->tag & 0x7) {
            case kTagAttemptStart: on_attempt_start(task, event->at); break;
            case kTagPrepareTally: on_prepare_tally(task, event->at); break;
            case kTagCommitTally: on_commit_tally(task, event->at); break;
            default: break;
        }
    }

    final_sync();

    ScenarioResult result;
    result.scenario_id = inst_.scenario_id;
    result.mode = inst_.mode;
    result.seed = inst_.seed;
    result.p_l = inst_.p_l;
    result.slot_seconds = inst_.slot_seconds;
    result.tick_seconds = cfg_.sim.tick_seconds;
    result.byzantine_nodes = byzantine_;
    result.makespan_ticks = makespan_;
    result.total_messages = net_.messages_sent() + recovery_messages_;
    for (std::uint64_t r = 0; r < cfg_.workload.requests; ++r) {
        const RequestScript& script = scripts_[r];
        const TaskRuntime& task = tasks_[r];
        RoundRecord rec;
        rec.request_idx = r;
        rec.leader = script.attempts.back().leader;
        rec.participants = script.attempts.back().participants;
        rec.success = script.success;
        rec.attempts = std::uint32_t(script.attempts.size());
        rec.latency_ticks = task.active_ticks;
        std::uint64_t max_attempt = 0;
        for (const AttemptScript& a : script.attempts) {
            rec.messages += a.messages;
            max_attempt = std::max(max_attempt, a.messages);
        }
        rec.max_attempt_messages = max_attempt;
        rec.committed_digest = task.committed;
        result.total_messages += rec.messages;
        result.records.push_back(rec);
    }
    result.replicas = std::move(replicas_);
    result.proofs = std::move(proofs_);
    return result;
}

HscSnapshot Engine::snapshot(NodeId entry) {
    HscSnapshot snap;
    std::map<NodeId, double> latency;
    for (std::uint32_t j = 0; j < n_; ++j) {
        double u = field_.uniform(rng_tag("latency"), 0, 0,
                                  entry.value * std::uint64_t(n_) + j);
        latency[NodeId{j}] = inst_.slot_seconds * (1.0 + cfg_.sim.latency_jitter * u);
    }
    snap.latency_seconds = latency;
    snap.trust = views_[entry.value].trust_scores();
    Clustering clustering = cluster_from_view(entry, 0, 0);
    snap.k = clustering.k;
    snap.lambda = cfg_.hsc.lambda_penalty;
    snap.assignment = clustering.assignment;
    snap.ccns = clustering.ccns;
    return snap;
}

} // namespace

bool ScenarioResult::is_byzantine(NodeId id) const {
    return std::find(byzantine_nodes.begin(), byzantine_nodes.end(), id) !=
           byzantine_nodes.end();
}

std::vector<ScenarioInstance> expand_config(const ScenarioConfig& config) {
    config.validate();
    std::vector<ConsensusMode> modes = config.modes;
    if (modes.empty()) modes.push_back(config.consensus.mode);

    struct ChannelPoint {
        double p_l;
        double slot_seconds;
    };
    std::vector<ChannelPoint> points;
    ChannelParams base{config.channel.bandwidth_hz, config.channel.capacity_bps,
                       config.channel.rate_bps, config.channel.subcarriers, 0.005};
    if (config.channel.slot_seconds) {
        base.slot_seconds = *config.channel.slot_seconds;
        double pl = config.channel.force_pl ? *config.channel.force_pl
                                            : channel_success_prob(base);
        points.push_back({pl, base.slot_seconds});
    } else if (config.channel.target_pl) {
        double t = solve_channel_latency(*config.channel.target_pl, base);
        points.push_back({*config.channel.target_pl, t});
    } else {
        for (double pl : config.channel.pl_grid) {
            double t = solve_channel_latency(pl, base);
            points.push_back({pl, t});
        }
    }

    std::vector<ScenarioInstance> out;
    for (ConsensusMode mode : modes) {
        for (const ChannelPoint& point : points) {
            for (std::uint64_t seed : config.seeds) {
                ScenarioInstance inst;
                inst.config = config;
                inst.mode = mode;
                inst.seed = seed;
                inst.p_l = point.p_l;
                inst.slot_seconds = point.slot_seconds;
                char buf[128];
                std::snprintf(buf, sizeof(buf), "%s_%s_pl%.4f_s%llu", config.name.c_str(),
                              to_string(mode), point.p_l,
                              static_cast<unsigned long long>(seed));
                inst.scenario_id = buf;
                out.push_back(std::move(inst));
            }
        }
    }
    return out;
}

ScenarioResult run_simulation(const ScenarioInstance& instance) {
    Engine engine(instance);
    return engine.run();
}

HscSnapshot hsc_snapshot(const ScenarioInstance& instance, NodeId entry) {
    Engine engine(instance);
    return engine.snapshot(entry);
}

} // namespace wbft
