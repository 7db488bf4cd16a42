#include "seqmc/sampling.hpp"

#include <cmath>

namespace seqmc {

uint64_t SampleStats::outcome_count(int party, int outcome) const {
    uint64_t n = 0;
    for (int x = 1; x <= labels; ++x)
        n += counts[static_cast<size_t>(party - 1)][static_cast<size_t>(x - 1)]
                   [static_cast<size_t>(outcome)];
    return n;
}

double SampleStats::outcome_frequency(int party, int outcome) const {
    if (trials == 0) return 0.0;
    return static_cast<double>(outcome_count(party, outcome)) / static_cast<double>(trials);
}

double SampleStats::empirical_confidence(int party, int outcome) const {
    uint64_t n = outcome_count(party, outcome);
    if (n == 0) return std::nan("");
    uint64_t hits = counts[static_cast<size_t>(party - 1)][static_cast<size_t>(outcome - 1)]
                          [static_cast<size_t>(outcome)];
    return static_cast<double>(hits) / static_cast<double>(n);
}

double SampleStats::confidence_sigma(int party, int outcome) const {
    uint64_t n = outcome_count(party, outcome);
    if (n == 0) return std::nan("");
    double c = empirical_confidence(party, outcome);
    return std::sqrt(std::max(c * (1.0 - c), 1.0 / static_cast<double>(n)) /
                     static_cast<double>(n));
}

SampleStats sample_run(const Ensemble& ens, const std::vector<KrausChannel>& channels,
                       uint64_t seed, uint64_t trials) {
    if (trials < 1) throw ParamOutOfRange("sample_run needs trials >= 1");
    if (channels.empty()) throw ParamOutOfRange("sample_run needs at least one channel");
    for (const KrausChannel& ch : channels)
        if (ch.dim() != ens.dim()) throw DimensionMismatch("channel/ensemble dimension mismatch");

    const int parties = static_cast<int>(channels.size());
    const int labels = ens.size();
    SampleStats stats;
    stats.parties = parties;
    stats.labels = labels;
    stats.trials = trials;
    stats.counts.assign(static_cast<size_t>(parties),
                        std::vector<std::vector<uint64_t>>(
                            static_cast<size_t>(labels),
                            std::vector<uint64_t>(static_cast<size_t>(labels) + 1, 0)));

    for (uint64_t t = 0; t < trials; ++t) {
        // step 0: true label
        double u = counter_uniform(seed, t, 0);
        int label = labels;
        double acc = 0.0;
        for (int x = 1; x <= labels; ++x) {
            acc += ens.priors[static_cast<size_t>(x - 1)];
            if (u < acc) {
                label = x;
                break;
            }
        }

        DensityOperator rho = ens.states[static_cast<size_t>(label - 1)];
        for (int j = 1; j <= parties; ++j) {
            const KrausChannel& ch = channels[static_cast<size_t>(j - 1)];
            std::vector<double> probs(static_cast<size_t>(ch.size()));
            double total = 0.0;
            for (int i = 0; i < ch.size(); ++i) {
                probs[static_cast<size_t>(i)] = std::max(ch.outcome_probability(i, rho), 0.0);
                total += probs[static_cast<size_t>(i)];
            }
            double v = counter_uniform(seed, t, static_cast<uint64_t>(j)) * total;
            int outcome = ch.size() - 1;
            double cum = 0.0;
            for (int i = 0; i < ch.size(); ++i) {
                cum += probs[static_cast<size_t>(i)];
                if (v < cum) {
                    outcome = i;
                    break;
                }
            }
            if (outcome <= labels)
                ++stats.counts[static_cast<size_t>(j - 1)][static_cast<size_t>(label - 1)]
                              [static_cast<size_t>(outcome)];
            rho = ch.collapse(outcome, rho);
        }
    }
    return stats;
}

}  // namespace seqmc
