#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "medguard/agent/agent.hpp"
#include "medguard/ledger/encoding.hpp"
#include "medguard/stats/metrics.hpp"

namespace medguard {

// One request plus the ground truth only the harness knows.
struct StreamItem {
    SignedRequest request;
    bool is_attack = false;
};

// Builds a labeled request stream from a raw (un-normalized) corpus: exactly
// round(attack_percentage * n) attack rows, positions shuffled, vectors
// sampled with replacement, each signed by a random enrolled device.
inline std::vector<StreamItem> make_request_stream(const Dataset& pool, const DeviceRegistry& registry,
                                                   const std::vector<std::string>& device_ids,
                                                   std::size_t n, double attack_percentage, Rng& rng,
                                                   const Clock& clock, int benign_class) {
    if (!(attack_percentage > 0.0 && attack_percentage < 1.0))
        throw std::invalid_argument("attack_percentage must lie in (0,1)");
    if (device_ids.empty()) throw std::invalid_argument("no devices enrolled for the stream");

    std::vector<std::size_t> attack_rows;
    std::vector<std::size_t> benign_rows;
    for (std::size_t i = 0; i < pool.rows.size(); ++i)
        (pool.rows[i].label == benign_class ? benign_rows : attack_rows).push_back(i);
    if (attack_rows.empty() || benign_rows.empty())
        throw std::invalid_argument("stream pool needs both attack and benign rows");

    const auto attack_count = static_cast<std::size_t>(
        std::floor(attack_percentage * static_cast<double>(n) + 0.5));
    std::vector<bool> truth(n, false);
    for (std::size_t i = 0; i < attack_count; ++i) truth[i] = true;
    rng.shuffle(truth);

    std::vector<StreamItem> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rows = truth[i] ? attack_rows : benign_rows;
        const Row& row = pool.rows[rows[rng.next_below(rows.size())]];
        const std::string& device = device_ids[rng.next_below(device_ids.size())];
        StreamItem item;
        item.is_attack = truth[i];
        item.request = sign_request(registry, device, encode_feature_vector(row.features), rng, clock);
        items.push_back(std::move(item));
    }
    return items;
}

struct StreamReport {
    std::size_t n = 0;
    double attack_percentage = 0.0;
    ConfusionCounts counts;  // positive = attack, predicted-positive = rejected
    MetricValue dr;
    MetricValue far;
    std::map<std::string, std::size_t> per_stage_counts;
    std::vector<Decision> decisions;
    std::vector<bool> truth;
};

// Drives the assembled pipeline over a labeled stream and scores rejections
// against the ground truth: DR = TP/(TP+FN), FAR = FP/(FP+TN).
inline StreamReport replay_stream(Agent& agent, const std::vector<StreamItem>& items,
                                  double attack_percentage) {
    StreamReport report;
    report.n = items.size();
    report.attack_percentage = attack_percentage;
    for (const auto& item : items) {
        Decision d = agent.handle_request(item.request);
        const bool flagged = !d.accepted;
        if (item.is_attack)
            (flagged ? report.counts.tp : report.counts.fn)++;
        else
            (flagged ? report.counts.fp : report.counts.tn)++;
        report.per_stage_counts[std::string(to_string(d.stage)) + "/" +
                                (d.accepted ? "accepted" : "rejected")]++;
        report.truth.push_back(item.is_attack);
        report.decisions.push_back(std::move(d));
    }
    report.dr = detection_rate(report.counts);
    report.far = false_alarm_rate(report.counts);
    return report;
}

inline std::string decisions_to_csv(const StreamReport& report) {
    std::string out = "request_index,device_id,truth,outcome,stage,reason,predicted_label,block_index\n";
    for (std::size_t i = 0; i < report.decisions.size(); ++i) {
        const Decision& d = report.decisions[i];
        out += std::to_string(d.request_index) + ',' + d.device_id + ',' +
               (report.truth[i] ? "attack" : "benign") + ',' + (d.accepted ? "accepted" : "rejected") +
               ',' + to_string(d.stage) + ',' + to_string(d.reason) + ',' +
               std::to_string(d.predicted_label) + ',' + std::to_string(d.block_index) + '\n';
    }
    return out;
}

}  // namespace medguard
