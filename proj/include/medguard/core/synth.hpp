#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medguard/core/dataset.hpp"
#include "medguard/util/rng.hpp"

namespace medguard {

struct SynthResult {
    Dataset data;
    std::vector<std::size_t> informative_indices;
};

// Hermetic test corpus with known ground truth. Informative columns are
// class-conditional Gaussians: class 0 sits at the origin and each class
// c >= 1 is displaced by `separation` standard deviations on the informative
// columns with index f mod (n_classes-1) == c-1. With two classes every
// informative column separates them; with more classes each column is the
// only witness for one class, so the full informative set is needed to tell
// all classes apart. Noise columns are class-independent uniform draws.
inline SynthResult synth_generate(std::size_t n_rows, std::size_t n_informative, std::size_t n_noise,
                                  std::size_t n_classes, std::uint64_t seed, double separation = 5.0) {
    if (n_rows == 0 || n_informative == 0 || n_classes < 2)
        throw std::invalid_argument("synth_generate requires positive counts and at least 2 classes");

    const std::size_t c = n_informative + n_noise;
    const double sigma = 0.1;

    SynthResult result;
    Dataset& d = result.data;
    for (std::size_t i = 0; i < c; ++i) d.schema.feature_names.push_back("f" + std::to_string(i));
    d.schema.label_map["benign"] = 0;
    if (n_classes == 2) {
        d.schema.label_map["attack"] = 1;
    } else {
        for (std::size_t k = 1; k < n_classes; ++k)
            d.schema.label_map["attack" + std::to_string(k)] = static_cast<int>(k);
    }
    d.schema.positive_class = 1;
    d.schema.benign_class = 0;
    d.schema.validate();

    for (std::size_t i = 0; i < n_informative; ++i) result.informative_indices.push_back(i);

    Rng rng(seed);
    d.rows.reserve(n_rows);
    for (std::size_t label = 0; label < n_classes; ++label) {
        const std::size_t count = n_rows / n_classes + (label < n_rows % n_classes ? 1 : 0);
        for (std::size_t r = 0; r < count; ++r) {
            Row row;
            row.label = static_cast<int>(label);
            row.features.resize(c);
            for (std::size_t f = 0; f < n_informative; ++f) {
                const bool displaced = label > 0 && f % (n_classes - 1) == label - 1;
                const double mean = displaced ? separation * sigma : 0.0;
                row.features[f] = mean + sigma * rng.next_gaussian();
            }
            for (std::size_t f = n_informative; f < c; ++f) row.features[f] = rng.next_double();
            d.rows.push_back(std::move(row));
        }
    }
    rng.shuffle(d.rows);
    recompute_minmax(d);
    return result;
}

}  // namespace medguard
