#ifndef NTD_MODEL_HPP
#define NTD_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ntd/episodic_memory.hpp"
#include "ntd/sample.hpp"

namespace ntd {

// Multinomial logistic regression trained by streaming SGD. The update
// follows the summed (not averaged) batch cross-entropy gradient.
class SoftmaxClassifier {
public:
    // Weights start uniform in (-0.01, 0.01), bias at zero.
    SoftmaxClassifier(int num_classes, int feature_dim, double learning_rate,
                      std::uint64_t init_seed);

    static SoftmaxClassifier zeros(int num_classes, int feature_dim, double learning_rate);

    std::vector<double> logits(std::span<const double> x) const;

    // Softmax probabilities; entries in (0, 1), summing to 1.
    std::vector<double> predict(std::span<const double> x) const;

    // Cross-entropy in nats, computed from logits via log-sum-exp.
    double cross_entropy(std::span<const double> x, int label) const;

    // One full-batch gradient step on the summed loss. Returns the mean
    // batch loss for logging.
    double sgd_step(const std::vector<const Sample*>& batch);

    int num_classes() const noexcept { return num_classes_; }
    int feature_dim() const noexcept { return feature_dim_; }
    double learning_rate() const noexcept { return learning_rate_; }
    void set_learning_rate(double lr);
    long step_count() const noexcept { return step_count_; }

    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& bias() const noexcept { return bias_; }

    // Checkpoint: "C d step_count" header, then the flat parameter list.
    void save(std::ostream& out) const;
    static SoftmaxClassifier load(std::istream& in, double learning_rate);

private:
    int num_classes_;
    int feature_dim_;
    double learning_rate_;
    long step_count_ = 0;
    std::vector<double> weights_;  // row-major, num_classes x feature_dim
    std::vector<double> bias_;

    void check_input(std::span<const double> x) const;
    void logits_into(std::span<const double> x, std::vector<double>& out) const;
};

// Mini-batch SGD passes over a fixed sample set with a seeded shuffle
// each epoch. Returns the per-epoch mean loss trace.
std::vector<double> train_on_samples(SoftmaxClassifier& model,
                                     const std::vector<const Sample*>& data, int epochs,
                                     int batch_size, std::uint64_t seed);

std::vector<double> train_on_memory(SoftmaxClassifier& model, const EpisodicMemory& memory,
                                    int epochs, int batch_size, std::uint64_t seed);

// Fraction of samples whose argmax prediction equals the true label.
double evaluate_accuracy(const SoftmaxClassifier& model, const std::vector<Sample>& samples);

}  // namespace ntd

#endif  // NTD_MODEL_HPP
