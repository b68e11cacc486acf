#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace medguard {

enum class SecurityLevel : std::uint8_t { safe = 0, low, medium, high, critical };

inline const char* to_string(SecurityLevel l) {
    switch (l) {
        case SecurityLevel::safe: return "safe";
        case SecurityLevel::low: return "low";
        case SecurityLevel::medium: return "medium";
        case SecurityLevel::high: return "high";
        default: return "critical";
    }
}

inline SecurityLevel security_level_from_string(const std::string& s) {
    for (int i = 0; i <= 4; ++i)
        if (s == to_string(static_cast<SecurityLevel>(i))) return static_cast<SecurityLevel>(i);
    throw std::runtime_error("unknown security level '" + s + "'");
}

enum class PatternSource : std::uint8_t { seeded = 0, learned_from_classifier = 1 };

struct Pattern {
    std::uint64_t id = 0;
    std::vector<double> features;  // normalized, every value in [0,1]
    int label = 0;
    SecurityLevel security_level = SecurityLevel::safe;
    PatternSource source = PatternSource::seeded;
};

struct NearMatch {
    std::uint64_t pattern_id = 0;
    int label = 0;
    double distance = 0.0;
};

// Either a recognition (nearest stored pattern within theta) or the k
// nearest patterns for an unrecognized query.
struct MatchResult {
    bool recognized = false;
    std::uint64_t pattern_id = 0;
    int label = 0;
    SecurityLevel security_level = SecurityLevel::safe;
    double distance = 0.0;
    std::vector<NearMatch> nearest;  // ascending by (distance, id)
};

using SeverityRule = std::function<SecurityLevel(int label)>;

inline SeverityRule uniform_high_severity() {
    return [](int) { return SecurityLevel::high; };
}

// Exact linear index over known attack/benign feature signatures. The store
// also catalogs, by path, the serialized classifier it backs; it never
// executes models itself. Distances are Euclidean scaled by 1/sqrt(C), so
// they live in [0,1] on normalized features regardless of dimension.
class PatternStore {
public:
    PatternStore(std::size_t dimension, int benign_class)
        : dimension_(dimension), benign_class_(benign_class) {}

    std::size_t dimension() const { return dimension_; }
    int benign_class() const { return benign_class_; }

    const std::string& model_ref() const { return model_ref_; }
    void set_model_ref(std::string path) { model_ref_ = std::move(path); }
    std::size_t size() const { return patterns_.size(); }
    const std::vector<Pattern>& patterns() const { return patterns_; }

    std::uint64_t insert(std::vector<double> features, int label, SecurityLevel level,
                         PatternSource source) {
        if (features.size() != dimension_)
            throw std::invalid_argument("pattern dimension " + std::to_string(features.size()) +
                                        " does not match store dimension " + std::to_string(dimension_));
        for (double v : features)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("feature out of [0,1]: " + std::to_string(v));
        const bool benign = label == benign_class_;
        if (benign && level != SecurityLevel::safe)
            throw std::invalid_argument("benign patterns must carry security level safe");
        if (!benign && level == SecurityLevel::safe)
            throw std::invalid_argument("attack patterns cannot carry security level safe");

        Pattern p;
        p.id = next_id_++;
        p.features = std::move(features);
        p.label = label;
        p.security_level = level;
        p.source = source;
        patterns_.push_back(std::move(p));
        return patterns_.back().id;
    }

    double distance_to(const Pattern& p, const std::vector<double>& query) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) {
            const double d = p.features[i] - query[i];
            sum += d * d;
        }
        return std::sqrt(sum / static_cast<double>(dimension_));
    }

    MatchResult match(const std::vector<double>& query, double theta, std::size_t k) const {
        if (query.size() != dimension_) throw std::invalid_argument("query dimension mismatch");
        if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
        if (k == 0) throw std::invalid_argument("k must be at least 1");

        MatchResult result;
        if (patterns_.empty()) return result;  // unrecognized, empty nearest list

        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(patterns_.size());
        for (std::size_t i = 0; i < patterns_.size(); ++i)
            scored.emplace_back(distance_to(patterns_[i], query), i);
        const std::size_t keep = std::min(k, scored.size());
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                          [&](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first < b.first;
                              return patterns_[a.second].id < patterns_[b.second].id;
                          });

        const Pattern& best = patterns_[scored.front().second];
        if (scored.front().first <= theta) {
            result.recognized = true;
            result.pattern_id = best.id;
            result.label = best.label;
            result.security_level = best.security_level;
            result.distance = scored.front().first;
            return result;
        }
        for (std::size_t i = 0; i < keep; ++i) {
            const Pattern& p = patterns_[scored[i].second];
            result.nearest.push_back({p.id, p.label, scored[i].first});
        }
        return result;
    }

    // Classifier-detected attacks become stored patterns.
    const Pattern& record_attack(std::vector<double> features, int predicted_label,
                                 const SeverityRule& severity = uniform_high_severity()) {
        if (predicted_label == benign_class_)
            throw std::invalid_argument("record_attack: label is benign, refusing to store");
        insert(std::move(features), predicted_label, severity(predicted_label),
               PatternSource::learned_from_classifier);
        return patterns_.back();
    }

private:
    std::size_t dimension_;
    int benign_class_;
    std::string model_ref_;
    std::uint64_t next_id_ = 0;
    std::vector<Pattern> patterns_;
};

inline nlohmann::json pattern_to_json(const Pattern& p) {
    return {{"id", p.id},
            {"features", p.features},
            {"label", p.label},
            {"security_level", to_string(p.security_level)},
            {"source", p.source == PatternSource::seeded ? "seeded" : "learned-from-classifier"}};
}

inline std::string store_to_jsonl(const PatternStore& store) {
    std::string out;
    for (const auto& p : store.patterns()) out += pattern_to_json(p).dump() + "\n";
    return out;
}

// Rebuilds a store from JSON lines; ids are reassigned in file order.
inline PatternStore store_from_jsonl(const std::string& text, std::size_t dimension, int benign_class) {
    PatternStore store(dimension, benign_class);
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(start, end - start);
        if (!line.empty()) {
            const auto j = nlohmann::json::parse(line);
            store.insert(j.at("features").get<std::vector<double>>(), j.at("label").get<int>(),
                         security_level_from_string(j.at("security_level").get<std::string>()),
                         j.at("source").get<std::string>() == "seeded"
                             ? PatternSource::seeded
                             : PatternSource::learned_from_classifier);
        }
        start = end + 1;
    }
    return store;
}

}  // namespace medguard
