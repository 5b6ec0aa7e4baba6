#include "ntd/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "ntd/errors.hpp"
#include "ntd/rng.hpp"

namespace ntd {

SoftmaxClassifier::SoftmaxClassifier(int num_classes, int feature_dim, double learning_rate,
                                     std::uint64_t init_seed)
    : num_classes_(num_classes), feature_dim_(feature_dim), learning_rate_(learning_rate) {
    if (num_classes < 1 || feature_dim < 1) {
        throw std::invalid_argument("SoftmaxClassifier: num_classes and feature_dim must be positive");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("SoftmaxClassifier: learning_rate must be finite and >= 0");
    }
    weights_.resize(static_cast<std::size_t>(num_classes) * feature_dim);
    bias_.assign(static_cast<std::size_t>(num_classes), 0.0);
    auto eng = rng::engine(init_seed);
    std::uniform_real_distribution<double> init(-0.01, 0.01);
    for (auto& w : weights_) {
        w = init(eng);
    }
}

SoftmaxClassifier SoftmaxClassifier::zeros(int num_classes, int feature_dim,
                                           double learning_rate) {
    SoftmaxClassifier model(num_classes, feature_dim, learning_rate, 0);
    std::fill(model.weights_.begin(), model.weights_.end(), 0.0);
    return model;
}

void SoftmaxClassifier::set_learning_rate(double lr) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) {
        throw std::invalid_argument("SoftmaxClassifier: learning_rate must be finite and >= 0");
    }
    learning_rate_ = lr;
}

void SoftmaxClassifier::check_input(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != feature_dim_) {
        throw DimensionError("SoftmaxClassifier: input has dimension " +
                             std::to_string(x.size()) + ", expected " +
                             std::to_string(feature_dim_));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw NonFiniteError("SoftmaxClassifier: non-finite input feature");
        }
    }
}

std::vector<double> SoftmaxClassifier::logits(std::span<const double> x) const {
    std::vector<double> out;
    logits_into(x, out);
    return out;
}

void SoftmaxClassifier::logits_into(std::span<const double> x, std::vector<double>& out) const {
    check_input(x);
    out.resize(static_cast<std::size_t>(num_classes_));
    for (int c = 0; c < num_classes_; ++c) {
        const double* row = weights_.data() + static_cast<std::size_t>(c) * feature_dim_;
        double acc = bias_[static_cast<std::size_t>(c)];
        for (int j = 0; j < feature_dim_; ++j) {
            acc += row[j] * x[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(c)] = acc;
    }
}

std::vector<double> SoftmaxClassifier::predict(std::span<const double> x) const {
    std::vector<double> z = logits(x);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (auto& v : z) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (auto& v : z) {
        v /= sum;
    }
    return z;
}

double SoftmaxClassifier::cross_entropy(std::span<const double> x, int label) const {
    if (label < 0 || label >= num_classes_) {
        throw std::invalid_argument("SoftmaxClassifier::cross_entropy: label out of range");
    }
    static thread_local std::vector<double> z;
    logits_into(x, z);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) {
        sum += std::exp(v - mx);
    }
    const double lse = mx + std::log(sum);
    return std::max(0.0, lse - z[static_cast<std::size_t>(label)]);
}

double SoftmaxClassifier::sgd_step(const std::vector<const Sample*>& batch) {
    if (batch.empty()) {
        throw std::invalid_argument("SoftmaxClassifier::sgd_step: empty batch");
    }
    const std::size_t cd = weights_.size();
    std::vector<double> grad_w(cd, 0.0);
    std::vector<double> grad_b(static_cast<std::size_t>(num_classes_), 0.0);
    double loss_sum = 0.0;

    std::vector<double> z;
    for (const Sample* s : batch) {
        logits_into(s->features, z);
        const int y = s->noisy_label;
        if (y < 0 || y >= num_classes_) {
            throw std::invalid_argument("SoftmaxClassifier::sgd_step: label out of range");
        }
        const double logit_y = z[static_cast<std::size_t>(y)];
        const double mx = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (auto& v : z) {
            v = std::exp(v - mx);
            sum += v;
        }
        loss_sum += std::max(0.0, mx + std::log(sum) - logit_y);
        for (int c = 0; c < num_classes_; ++c) {
            const double p = z[static_cast<std::size_t>(c)] / sum;
            const double g = p - (c == y ? 1.0 : 0.0);
            grad_b[static_cast<std::size_t>(c)] += g;
            double* grow = grad_w.data() + static_cast<std::size_t>(c) * feature_dim_;
            const auto& x = s->features;
            for (int j = 0; j < feature_dim_; ++j) {
                grow[j] += g * x[static_cast<std::size_t>(j)];
            }
        }
    }

    if (!std::isfinite(loss_sum)) {
        throw NonFiniteError("SoftmaxClassifier::sgd_step: non-finite batch loss at step " +
                             std::to_string(step_count_));
    }
    for (std::size_t i = 0; i < cd; ++i) {
        if (!std::isfinite(grad_w[i])) {
            throw NonFiniteError("SoftmaxClassifier::sgd_step: non-finite weight gradient at index " +
                                 std::to_string(i) + ", step " + std::to_string(step_count_));
        }
    }
    for (std::size_t c = 0; c < grad_b.size(); ++c) {
        if (!std::isfinite(grad_b[c])) {
            throw NonFiniteError("SoftmaxClassifier::sgd_step: non-finite bias gradient for class " +
                                 std::to_string(c) + ", step " + std::to_string(step_count_));
        }
    }

    for (std::size_t i = 0; i < cd; ++i) {
        weights_[i] -= learning_rate_ * grad_w[i];
    }
    for (std::size_t c = 0; c < grad_b.size(); ++c) {
        bias_[c] -= learning_rate_ * grad_b[c];
    }
    ++step_count_;
    return loss_sum / static_cast<double>(batch.size());
}

void SoftmaxClassifier::save(std::ostream& out) const {
    out << num_classes_ << ' ' << feature_dim_ << ' ' << step_count_ << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        out << weights_[i] << (i + 1 == weights_.size() ? '\n' : ' ');
    }
    for (std::size_t c = 0; c < bias_.size(); ++c) {
        out << bias_[c] << (c + 1 == bias_.size() ? '\n' : ' ');
    }
}

SoftmaxClassifier SoftmaxClassifier::load(std::istream& in, double learning_rate) {
    int num_classes = 0;
    int feature_dim = 0;
    long step_count = 0;
    if (!(in >> num_classes >> feature_dim >> step_count)) {
        throw IoError("SoftmaxClassifier::load: malformed checkpoint header");
    }
    if (num_classes < 1 || feature_dim < 1 || step_count < 0) {
        throw IoError("SoftmaxClassifier::load: invalid checkpoint header");
    }
    SoftmaxClassifier model = zeros(num_classes, feature_dim, learning_rate);
    model.step_count_ = step_count;
    for (auto& w : model.weights_) {
        if (!(in >> w)) {
            throw IoError("SoftmaxClassifier::load: truncated parameter list");
        }
    }
    for (auto& b : model.bias_) {
        if (!(in >> b)) {
            throw IoError("SoftmaxClassifier::load: truncated parameter list");
        }
    }
    for (double w : model.weights_) {
        if (!std::isfinite(w)) {
            throw NonFiniteError("SoftmaxClassifier::load: non-finite weight in checkpoint");
        }
    }
    for (double b : model.bias_) {
        if (!std::isfinite(b)) {
            throw NonFiniteError("SoftmaxClassifier::load: non-finite bias in checkpoint");
        }
    }
    return model;
}

std::vector<double> train_on_samples(SoftmaxClassifier& model,
                                     const std::vector<const Sample*>& data, int epochs,
                                     int batch_size, std::uint64_t seed) {
    if (data.empty()) {
        throw EmptyMemoryError("train_on_samples: no samples to train on");
    }
    if (epochs < 1 || batch_size < 1) {
        throw std::invalid_argument("train_on_samples: epochs and batch_size must be positive");
    }
    std::vector<const Sample*> order = data;
    auto eng = rng::engine(seed);
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(epochs));
    std::vector<const Sample*> batch;
    for (int e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), eng);
        double weighted_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
            batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
            weighted_loss += model.sgd_step(batch) * static_cast<double>(batch.size());
        }
        trace.push_back(weighted_loss / static_cast<double>(order.size()));
    }
    return trace;
}

std::vector<double> train_on_memory(SoftmaxClassifier& model, const EpisodicMemory& memory,
                                    int epochs, int batch_size, std::uint64_t seed) {
    return train_on_samples(model, memory.all_samples(), epochs, batch_size, seed);
}

double evaluate_accuracy(const SoftmaxClassifier& model, const std::vector<Sample>& samples) {
    if (samples.empty()) {
        throw std::invalid_argument("evaluate_accuracy: empty sample set");
    }
    std::size_t correct = 0;
    for (const auto& s : samples) {
        const std::vector<double> probs = model.predict(s.features);
        const auto arg = std::max_element(probs.begin(), probs.end()) - probs.begin();
        if (static_cast<int>(arg) == s.true_label) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace ntd
