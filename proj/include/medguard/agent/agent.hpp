#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medguard/core/dataset.hpp"
#include "medguard/ledger/chain.hpp"
#include "medguard/ledger/request.hpp"
#include "medguard/nn/train.hpp"
#include "medguard/patterns/store.hpp"

namespace medguard {

enum class DecisionStage { phase1_auth, phase2_pattern, phase3_classifier };

inline const char* to_string(DecisionStage s) {
    switch (s) {
        case DecisionStage::phase1_auth: return "phase1_auth";
        case DecisionStage::phase2_pattern: return "phase2_pattern";
        default: return "phase3_classifier";
    }
}

struct Decision {
    std::uint64_t request_index = 0;
    std::string device_id;
    bool accepted = false;
    DecisionStage stage = DecisionStage::phase1_auth;
    DecisionReason reason = DecisionReason::none;
    int predicted_label = -1;         // -1 when the classifier never ran
    std::vector<double> probabilities;  // empty when the classifier never ran
    std::uint64_t block_index = 0;
};

struct AgentConfig {
    double theta = 0.05;   // pattern recognition radius
    std::size_t k = 5;     // neighbors reported for unrecognized patterns
    bool fast_path_enabled = true;  // recognized-benign skips the classifier
    int benign_class = 0;
};

// The three-phase security agent: authenticate, pattern-check, classify.
// Every handled request appends exactly one block to the ledger.
class Agent {
public:
    Agent(AgentConfig cfg, DeviceRegistry registry, BiLstmModel model, FeatureMask mask,
          std::vector<double> feature_min, std::vector<double> feature_max, PatternStore store,
          Bytes agent_key, Clock clock)
        : cfg_(cfg),
          registry_(std::move(registry)),
          model_(std::move(model)),
          mask_(std::move(mask)),
          feature_min_(std::move(feature_min)),
          feature_max_(std::move(feature_max)),
          store_(std::move(store)),
          ledger_(std::move(agent_key)),
          clock_(std::move(clock)) {
        if (mask_.size() != feature_min_.size() || feature_min_.size() != feature_max_.size())
            throw std::invalid_argument("agent: mask and normalization stats disagree on dimension");
        if (store_.dimension() != mask_.size())
            throw std::invalid_argument("agent: pattern store dimension must equal the full feature count");
        if (model_.input_features != mask_.popcount())
            throw std::invalid_argument("agent: model input does not match the mask");
    }

    const Ledger& ledger() const { return ledger_; }
    const PatternStore& store() const { return store_; }
    const DeviceRegistry& registry() const { return registry_; }

    Decision handle_request(const SignedRequest& req) {
        Decision decision;
        decision.request_index = next_index_++;
        decision.device_id = req.device_id;

        // phase 1: authenticity
        const RequestVerdict verdict = verify_request(registry_, req, seen_);
        if (verdict != RequestVerdict::valid) {
            decision.stage = DecisionStage::phase1_auth;
            decision.reason = verdict == RequestVerdict::bad_tag      ? DecisionReason::bad_tag
                              : verdict == RequestVerdict::replay     ? DecisionReason::replay
                                                                      : DecisionReason::unknown_device;
            return finish(decision, req);
        }
        seen_.record(req);

        std::vector<double> normalized;
        try {
            normalized = normalize_payload(req.payload);
        } catch (const std::exception&) {
            decision.stage = DecisionStage::phase1_auth;
            decision.reason = DecisionReason::malformed_payload;
            return finish(decision, req);
        }

        // phase 2: pattern recognition against the data source
        const MatchResult match = store_.match(normalized, cfg_.theta, cfg_.k);
        if (match.recognized) {
            if (match.label != cfg_.benign_class) {
                decision.stage = DecisionStage::phase2_pattern;
                decision.reason = DecisionReason::recognized_attack_pattern;
                return finish(decision, req);
            }
            if (cfg_.fast_path_enabled) {
                decision.accepted = true;
                decision.stage = DecisionStage::phase2_pattern;
                decision.reason = DecisionReason::recognized_benign_pattern;
                return finish(decision, req);
            }
            // fast path off: a recognized-benign request still faces the classifier
        }

        // phase 3: the classifier decides
        const Prediction pred = predict_one(model_, mask_row(normalized, mask_));
        decision.stage = DecisionStage::phase3_classifier;
        decision.predicted_label = pred.label;
        decision.probabilities = pred.probabilities;
        if (pred.label != cfg_.benign_class) {
            decision.reason = DecisionReason::classifier_attack;
            store_.record_attack(normalized, pred.label);
        } else {
            decision.accepted = true;
            decision.reason = DecisionReason::classifier_benign;
        }
        return finish(decision, req);
    }

private:
    std::vector<double> normalize_payload(const Bytes& payload) const {
        const std::vector<double> raw = decode_feature_vector(payload);
        if (raw.size() != feature_min_.size())
            throw std::runtime_error("payload feature count mismatch");
        std::vector<double> out(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const double span = feature_max_[i] - feature_min_[i];
            const double v = span == 0.0 ? 0.0 : (raw[i] - feature_min_[i]) / span;
            out[i] = std::min(1.0, std::max(0.0, v));
            if (!std::isfinite(raw[i])) throw std::runtime_error("non-finite feature");
        }
        return out;
    }

    Decision finish(Decision decision, const SignedRequest& req) {
        const Block& block = ledger_.append(req, decision.accepted ? kBlockAccepted : kBlockRejected,
                                            decision.reason, clock_);
        decision.block_index = block.index;
        return decision;
    }

    AgentConfig cfg_;
    DeviceRegistry registry_;
    BiLstmModel model_;
    FeatureMask mask_;
    std::vector<double> feature_min_;
    std::vector<double> feature_max_;
    PatternStore store_;
    Ledger ledger_;
    Clock clock_;
    SeenNonces seen_;
    std::uint64_t next_index_ = 0;
};

}  // namespace medguard
