#ifndef ITCR_SYNTH_HPP
#define ITCR_SYNTH_HPP

#include "itcr/dataset.hpp"

#include <cstdint>

namespace itcr {

// Planted-signal n << p data: informative predictors have class means
// base_offset -/+ delta/2 (sd 1), all others base_offset (sd 1).
struct SynthConfig {
    Index m = 60;
    Index n = 500;
    Index n_informative = 20;
    double delta = 3.0;
    double class_balance = 0.5;   // fraction of compounds with response 1
    std::vector<std::pair<PredictorClass, double>> class_proportions{
        {PredictorClass::TS, 1.0}, {PredictorClass::TC, 1.0}, {PredictorClass::AP, 1.0}};
    double base_offset = 10.0;
    std::uint64_t seed = 0;

    void check() const;
};

struct SyntheticData {
    Dataset dataset;
    IndexList informative;   // ascending predictor positions
};

SyntheticData generate_synthetic(const SynthConfig& cfg);

// Fraction of `truth` contained in `selected`.
double recall(const IndexList& selected, const IndexList& truth);

} // namespace itcr

#endif // ITCR_SYNTH_HPP
