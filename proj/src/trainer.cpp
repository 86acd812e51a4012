#include "laftr/trainer.hpp"

#include "laftr/errors.hpp"
#include "laftr/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace laftr::training {

using nn::Matrix;
using objectives::AdvObjectiveKind;

// ------------------------------------------------------------------- config

void TrainConfig::validate() const {
    if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
        throw InputError("alpha, beta and gamma must be nonnegative");
    }
    if (batch_size < 1 || checkpoint_interval < 1) {
        throw InputError("batch size and checkpoint interval must be at least 1");
    }
    if (hidden_width < 1 || representation_width < 1) {
        throw InputError("hidden and representation widths must be at least 1");
    }
    if (!(adam.learning_rate > 0.0)) {
        throw InputError("learning rate must be positive");
    }
}

namespace {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace

std::string TrainConfig::canonical() const {
    std::ostringstream out;
    out << "alpha=" << format_double(alpha) << ";beta=" << format_double(beta) << ";gamma=" << format_double(gamma)
        << ";objective=" << objectives::to_string(objective)
        << ";adversary_input=" << (adversary_input == AdversaryInput::Representation ? "representation" : "prediction")
        << ";fairness_term=" << (fairness_term == FairnessTerm::Adversary ? "adversary" : "soft-eo")
        << ";epochs=" << epochs << ";batch_size=" << batch_size << ";lr=" << format_double(adam.learning_rate)
        << ";beta1=" << format_double(adam.beta1) << ";beta2=" << format_double(adam.beta2)
        << ";eps=" << format_double(adam.epsilon) << ";checkpoint_interval=" << checkpoint_interval
        << ";hidden=" << hidden_width << ";repr=" << representation_width
        << ";append_sensitive=" << (append_sensitive ? 1 : 0) << ";leaky_slope=" << format_double(nn::kLeakySlope)
        << ";seed=" << seed;
    return out.str();
}

std::string TrainConfig::fingerprint() const { return fingerprint_of(canonical()); }

// -------------------------------------------------------------------- model

LaftrModel LaftrModel::initialize(const TrainConfig& config, const data::GroupedDataset& train,
                                  std::mt19937_64& rng) {
    config.validate();
    LaftrModel model;
    model.input = InputEncoding::fit(train, config.append_sensitive);
    model.adversary_input = config.adversary_input;
    model.adversary_sees_label =
        config.adversary_input == AdversaryInput::PredictionAndLabel || objectives::uses_label(config.objective);
    const auto d = train.feature_width();
    const auto m = config.representation_width;
    const auto hidden = config.hidden_width;
    model.encoder = nn::MlpNetwork({model.input.width(d), hidden, m}, nn::OutputActivation::Identity, rng);
    model.classifier = nn::MlpNetwork({m, hidden, 1}, nn::OutputActivation::Sigmoid, rng);
    const std::size_t adversary_in = config.adversary_input == AdversaryInput::PredictionAndLabel
                                         ? 2
                                         : m + (model.adversary_sees_label ? 1 : 0);
    model.adversary = nn::MlpNetwork({adversary_in, hidden, 1}, nn::OutputActivation::Sigmoid, rng);
    if (config.beta > 0.0) {
        model.decoder = nn::MlpNetwork({m + 1, hidden, d}, nn::OutputActivation::Identity, rng);
    }
    return model;
}

RepresentationPtr LaftrModel::representation(std::string name) const {
    return std::make_shared<EncoderRepresentation>(encoder, input, std::move(name));
}

void LaftrModel::check_consistency(std::size_t feature_width) const {
    const auto m = encoder.output_width();
    if (encoder.input_width() != input.width(feature_width)) {
        throw InputError("encoder input width does not match the dataset");
    }
    if (classifier.input_width() != m) {
        throw InputError("classifier input width differs from the representation width");
    }
    const std::size_t expected_adv = adversary_input == AdversaryInput::PredictionAndLabel
                                         ? 2
                                         : m + (adversary_sees_label ? 1 : 0);
    if (adversary.input_width() != expected_adv) {
        throw InputError("adversary input width does not match its input mode");
    }
    if (decoder && (decoder->input_width() != m + 1 || decoder->output_width() != feature_width)) {
        throw InputError("decoder widths do not match representation and feature widths");
    }
}

// -------------------------------------------------------------------- batch

Batch Batch::from(const data::GroupedDataset& ds, const InputEncoding& input) {
    return {input.apply(ds), ds.features, ds.labels, ds.sensitive};
}

Batch Batch::rows(std::span<const std::size_t> indices) const {
    Batch out;
    const auto n = static_cast<Eigen::Index>(indices.size());
    out.encoder_input.resize(n, encoder_input.cols());
    out.features.resize(n, features.cols());
    out.labels.reserve(indices.size());
    out.sensitive.reserve(indices.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]);
        out.encoder_input.row(i) = encoder_input.row(src);
        out.features.row(i) = features.row(src);
        out.labels.push_back(labels[static_cast<std::size_t>(src)]);
        out.sensitive.push_back(sensitive[static_cast<std::size_t>(src)]);
    }
    return out;
}

// ------------------------------------------------------------ forward/backward

namespace {

Matrix column_of(std::span<const int> values) {
    Matrix out(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out(static_cast<Eigen::Index>(i), 0) = values[i];
    }
    return out;
}

std::vector<double> to_vector(const Matrix& column) {
    return {column.data(), column.data() + column.rows()};
}

struct SoftEqualizedOdds {
    double value = 0.0;
    nn::Vector gradient;
};

// |mean g(00) - mean g(10)| + |mean (1-g)(01) - mean (1-g)(11)| over cells (a, y).
SoftEqualizedOdds soft_equalized_odds(const Matrix& g, std::span<const int> a, std::span<const int> y) {
    std::array<std::array<double, 2>, 2> sum{};
    std::array<std::array<std::size_t, 2>, 2> count{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ai = static_cast<std::size_t>(a[i]);
        const auto yi = static_cast<std::size_t>(y[i]);
        sum[ai][yi] += g(static_cast<Eigen::Index>(i), 0);
        count[ai][yi] += 1;
    }
    for (int ai = 0; ai < 2; ++ai) {
        for (int yi = 0; yi < 2; ++yi) {
            if (count[static_cast<std::size_t>(ai)][static_cast<std::size_t>(yi)] == 0) {
                throw GroupStarvationError("batch has no rows in cell (a=" + std::to_string(ai) +
                                           ", y=" + std::to_string(yi) + ")");
            }
        }
    }
    const auto mean = [&](std::size_t ai, std::size_t yi) { return sum[ai][yi] / static_cast<double>(count[ai][yi]); };
    const double fpr_gap = mean(0, 0) - mean(1, 0);
    const double fnr_gap = mean(1, 1) - mean(0, 1);
    SoftEqualizedOdds out{std::abs(fpr_gap) + std::abs(fnr_gap), nn::Vector::Zero(static_cast<Eigen::Index>(a.size()))};
    const auto sgn = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ai = static_cast<std::size_t>(a[i]);
        const auto yi = static_cast<std::size_t>(y[i]);
        const double inv = 1.0 / static_cast<double>(count[ai][yi]);
        const double direction = (yi == 0) == (ai == 0) ? 1.0 : -1.0;
        out.gradient(static_cast<Eigen::Index>(i)) = sgn(yi == 0 ? fpr_gap : fnr_gap) * direction * inv;
    }
    return out;
}

struct Pass {
    nn::ForwardTrace encoder;
    nn::ForwardTrace classifier;
    std::optional<nn::ForwardTrace> decoder;
    std::optional<nn::ForwardTrace> adversary;
    Matrix decoder_input;
    LossTerms loss;
    // d L_fair / d h (adversary) or d L_fair / d g-hat (soft EO), unweighted.
    nn::Vector fairness_gradient;
};

Matrix adversary_input(const LaftrModel& model, const Matrix& z, const Matrix& g, const Batch& batch) {
    const auto n = z.rows();
    if (model.adversary_input == AdversaryInput::PredictionAndLabel) {
        Matrix in(n, 2);
        in.col(0) = g.col(0);
        in.col(1) = column_of(batch.labels).col(0);
        return in;
    }
    if (!model.adversary_sees_label) {
        return z;
    }
    Matrix in(n, z.cols() + 1);
    in.leftCols(z.cols()) = z;
    in.col(z.cols()) = column_of(batch.labels).col(0);
    return in;
}

Pass run_forward(const LaftrModel& model, const Batch& batch, const TrainConfig& config) {
    if (batch.size() == 0) {
        throw InputError("empty minibatch");
    }
    Pass pass;
    pass.encoder = model.encoder.forward_trace(batch.encoder_input);
    const Matrix& z = pass.encoder.output;
    pass.classifier = model.classifier.forward_trace(z);
    const Matrix y = column_of(batch.labels);
    pass.loss.classification = nn::loss_value(nn::LossKind::CrossEntropy, pass.classifier.output, y);

    if (model.decoder) {
        pass.decoder_input.resize(z.rows(), z.cols() + 1);
        pass.decoder_input.leftCols(z.cols()) = z;
        pass.decoder_input.col(z.cols()) = column_of(batch.sensitive).col(0);
        pass.decoder = model.decoder->forward_trace(pass.decoder_input);
        pass.loss.reconstruction = nn::loss_value(nn::LossKind::SquaredError, pass.decoder->output, batch.features);
    } else if (config.beta > 0.0) {
        throw InputError("beta > 0 requires a decoder");
    }

    if (config.fairness_term == FairnessTerm::Adversary) {
        pass.adversary = model.adversary.forward_trace(adversary_input(model, z, pass.classifier.output, batch));
        const auto h = to_vector(pass.adversary->output);
        auto eval = objectives::evaluate(config.objective, h, batch.sensitive, batch.labels);
        pass.loss.adversarial = eval.value;
        pass.fairness_gradient = std::move(eval.gradient);
    } else {
        auto eval = soft_equalized_odds(pass.classifier.output, batch.sensitive, batch.labels);
        pass.loss.adversarial = eval.value;
        pass.fairness_gradient = std::move(eval.gradient);
    }
    pass.loss.total = config.alpha * pass.loss.classification + config.beta * pass.loss.reconstruction +
                      config.gamma * pass.loss.adversarial;
    return pass;
}

}  // namespace

LossTerms combined_loss(const LaftrModel& model, const Batch& batch, const TrainConfig& config) {
    return run_forward(model, batch, config).loss;
}

ModelGradients combined_loss_gradients(const LaftrModel& model, const Batch& batch, const TrainConfig& config) {
    Pass pass = run_forward(model, batch, config);
    ModelGradients out;
    out.loss = pass.loss;
    const Matrix y = column_of(batch.labels);
    const Matrix& z = pass.encoder.output;
    const auto m = z.cols();

    Matrix d_z = Matrix::Zero(z.rows(), m);
    Matrix d_g = config.alpha * nn::loss_gradient(nn::LossKind::CrossEntropy, pass.classifier.output, y);

    if (model.decoder) {
        const Matrix d_xhat =
            config.beta * nn::loss_gradient(nn::LossKind::SquaredError, pass.decoder->output, batch.features);
        auto grads = model.decoder->backward(*pass.decoder, d_xhat);
        d_z += grads.input.leftCols(m);
        out.decoder = std::move(grads.layers);
    }

    if (config.fairness_term == FairnessTerm::Adversary) {
        const Matrix d_h = config.gamma * Matrix(pass.fairness_gradient);
        auto grads = model.adversary.backward(*pass.adversary, d_h);
        if (model.adversary_input == AdversaryInput::PredictionAndLabel) {
            d_g.col(0) += grads.input.col(0);
        } else {
            d_z += grads.input.leftCols(m);
        }
        out.adversary = std::move(grads.layers);
    } else {
        d_g.col(0) += config.gamma * pass.fairness_gradient;
        out.adversary = nn::zeros_like(model.adversary);
    }

    auto classifier_grads = model.classifier.backward(pass.classifier, d_g);
    d_z += classifier_grads.input;
    out.classifier = std::move(classifier_grads.layers);
    out.encoder = model.encoder.backward(pass.encoder, d_z).layers;
    return out;
}

double adversary_objective(const LaftrModel& model, const Batch& batch, const TrainConfig& config) {
    return run_forward(model, batch, config).loss.adversarial;
}

std::vector<nn::DenseLayer> adversary_objective_gradient(const LaftrModel& model, const Batch& batch,
                                                         const TrainConfig& config) {
    if (config.fairness_term != FairnessTerm::Adversary) {
        return nn::zeros_like(model.adversary);
    }
    Pass pass = run_forward(model, batch, config);
    return model.adversary.backward(*pass.adversary, Matrix(pass.fairness_gradient)).layers;
}

// --------------------------------------------------------------------- steps

OptimizerStates OptimizerStates::for_model(const LaftrModel& model, const nn::AdamSettings& settings) {
    OptimizerStates s;
    s.encoder = nn::AdamState(model.encoder, settings, "encoder");
    s.classifier = nn::AdamState(model.classifier, settings, "classifier");
    if (model.decoder) {
        s.decoder = nn::AdamState(*model.decoder, settings, "decoder");
    }
    s.adversary = nn::AdamState(model.adversary, settings, "adversary");
    return s;
}

LossTerms train_step(LaftrModel& model, const Batch& batch, const TrainConfig& config, OptimizerStates& states) {
    const auto grads = combined_loss_gradients(model, batch, config);
    if (!std::isfinite(grads.loss.total)) {
        std::ostringstream msg;
        msg << "non-finite loss (L_C=" << grads.loss.classification << ", L_Dec=" << grads.loss.reconstruction
            << ", L_Adv=" << grads.loss.adversarial << ")";
        throw NonFiniteError("loss", msg.str());
    }
    nn::adam_step(model.encoder, grads.encoder, states.encoder);
    nn::adam_step(model.classifier, grads.classifier, states.classifier);
    if (model.decoder) {
        nn::adam_step(*model.decoder, grads.decoder, states.decoder);
    }
    if (config.fairness_term == FairnessTerm::Adversary) {
        // Ascent: descend on the negated objective.
        auto ascent = adversary_objective_gradient(model, batch, config);
        for (auto& layer : ascent) {
            layer.weight = -layer.weight;
            layer.bias = -layer.bias;
        }
        nn::adam_step(model.adversary, ascent, states.adversary);
    }
    return grads.loss;
}

std::vector<std::vector<std::size_t>> stratified_batches(const data::CellPartition& cells, std::size_t n,
                                                         std::size_t batch_size, const TrainConfig& config,
                                                         std::mt19937_64& rng) {
    if (n == 0) {
        return {};
    }
    std::vector<std::vector<std::size_t>> strata;
    const bool by_cell = config.fairness_term == FairnessTerm::SoftEqualizedOdds ||
                         objectives::uses_label(config.objective);
    if (by_cell) {
        for (int a = 0; a < 2; ++a) {
            for (int y = 0; y < 2; ++y) {
                strata.push_back(cells.cell(a, y));
            }
        }
    } else if (config.objective == AdvObjectiveKind::DP) {
        strata.push_back(cells.group(0));
        strata.push_back(cells.group(1));
    } else {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        strata.push_back(std::move(all));
    }

    const std::size_t count = (n + batch_size - 1) / batch_size;
    std::vector<std::vector<std::size_t>> batches(count);
    for (auto& stratum : strata) {
        if (stratum.empty()) {
            continue;
        }
        std::shuffle(stratum.begin(), stratum.end(), rng);
        const auto size = stratum.size();
        for (std::size_t b = 0; b < count; ++b) {
            if (size >= count) {
                const auto lo = b * size / count;
                const auto hi = (b + 1) * size / count;
                batches[b].insert(batches[b].end(), stratum.begin() + static_cast<std::ptrdiff_t>(lo),
                                  stratum.begin() + static_cast<std::ptrdiff_t>(hi));
            } else {
                batches[b].push_back(stratum[b % size]);
            }
        }
    }
    return batches;
}

// ----------------------------------------------------------------------- fit

std::string loss_log_csv(const std::vector<EpochLoss>& log, const std::string& provenance) {
    std::ostringstream out;
    out << "# " << provenance << "\n";
    out << "epoch,L_C,L_Dec,L_Adv,L\n";
    for (const auto& e : log) {
        out << e.epoch << ',' << format_double(e.mean.classification) << ',' << format_double(e.mean.reconstruction)
            << ',' << format_double(e.mean.adversarial) << ',' << format_double(e.mean.total) << '\n';
    }
    return out.str();
}

FitResult fit(const data::GroupedDataset& train, const TrainConfig& config, const FitOutputs& outputs) {
    config.validate();
    train.validate();
    if (train.size() == 0) {
        throw InputError("training split is empty");
    }
    std::mt19937_64 rng(config.seed);
    FitResult result;
    result.model = LaftrModel::initialize(config, train, rng);
    auto states = OptimizerStates::for_model(result.model, config.adam);
    const auto full = Batch::from(train, result.model.input);
    const auto cells = data::partition_cells(train);
    const auto fingerprint = config.fingerprint();

    if (outputs.checkpoint_dir) {
        std::filesystem::create_directories(*outputs.checkpoint_dir);
    }
    const auto snapshot = [&](std::size_t epoch) {
        std::ostringstream rng_state;
        rng_state << rng;
        Checkpoint ckpt{epoch, result.model, fingerprint, rng_state.str()};
        if (outputs.checkpoint_dir) {
            char name[64];
            std::snprintf(name, sizeof(name), "checkpoint-%05zu.laftr", epoch);
            save_checkpoint(ckpt, *outputs.checkpoint_dir / name);
        }
        result.checkpoints.push_back(std::move(ckpt));
    };

    snapshot(0);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto batches = stratified_batches(cells, train.size(), config.batch_size, config, rng);
        LossTerms sum;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            LossTerms terms;
            try {
                terms = train_step(result.model, full.rows(batches[b]), config, states);
            } catch (const NonFiniteError& e) {
                throw NonFiniteError(e.where(), "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) +
                                                    ": " + e.what());
            }
            sum.classification += terms.classification;
            sum.reconstruction += terms.reconstruction;
            sum.adversarial += terms.adversarial;
            sum.total += terms.total;
        }
        const auto count = static_cast<double>(batches.size());
        result.losses.push_back({epoch,
                                 {sum.classification / count, sum.reconstruction / count, sum.adversarial / count,
                                  sum.total / count}});
        if (epoch % config.checkpoint_interval == 0 || epoch == config.epochs) {
            snapshot(epoch);
        }
    }

    if (outputs.loss_log) {
        std::ofstream out(*outputs.loss_log);
        if (!out) {
            throw InputError("cannot write loss log " + outputs.loss_log->string());
        }
        out << loss_log_csv(result.losses, outputs.provenance.empty() ? "config_fingerprint=" + fingerprint
                                                                      : outputs.provenance);
    }
    return result;
}

}  // namespace laftr::training
