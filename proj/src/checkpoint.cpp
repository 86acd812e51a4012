#include "laftr/errors.hpp"
#include "laftr/trainer.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace laftr::training {

// Text layout, one record per line:
//
//   LAFTR-CHECKPOINT 1
//   fingerprint <hex>
//   epoch <n>
//   rng <mt19937_64 state>
//   input <append 0|1> <mean> <scale>
//   adversary <representation|prediction> <sees_label 0|1>
//   network <role> <sigmoid|identity> <layers>
//   layer <rows> <cols>
//   w <rows*cols values, column-major>
//   b <rows values>
//   end
//
// Reals are written as C99 hex floats so a reload is bit-exact.

namespace {

constexpr const char* kMagic = "LAFTR-CHECKPOINT";
constexpr int kVersion = 1;

std::string hex(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", value);
    return buf;
}

double parse_hex(const std::string& token) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw InputError("checkpoint: bad number '" + token + "'");
    }
    return value;
}

void write_network(std::ostream& out, const std::string& role, const nn::MlpNetwork& net) {
    out << "network " << role << ' ' << nn::to_string(net.output_activation()) << ' ' << net.layer_count() << '\n';
    for (const auto& layer : net.layers()) {
        out << "layer " << layer.weight.rows() << ' ' << layer.weight.cols() << "\nw";
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
            out << ' ' << hex(layer.weight.data()[i]);
        }
        out << "\nb";
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
            out << ' ' << hex(layer.bias.data()[i]);
        }
        out << '\n';
    }
}

std::istringstream next_line(std::istream& in, const std::string& expected_tag) {
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError("checkpoint truncated before '" + expected_tag + "'");
    }
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag != expected_tag) {
        throw InputError("checkpoint: expected '" + expected_tag + "', found '" + tag + "'");
    }
    return fields;
}

std::pair<std::string, nn::MlpNetwork> read_network(std::istream& in) {
    auto header = next_line(in, "network");
    std::string role;
    std::string activation;
    std::size_t count = 0;
    header >> role >> activation >> count;
    std::vector<nn::DenseLayer> layers;
    for (std::size_t l = 0; l < count; ++l) {
        auto shape = next_line(in, "layer");
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        shape >> rows >> cols;
        nn::DenseLayer layer{nn::Matrix(rows, cols), nn::Vector(rows)};
        auto w = next_line(in, "w");
        std::string token;
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
            if (!(w >> token)) {
                throw InputError("checkpoint: weight list too short");
            }
            layer.weight.data()[i] = parse_hex(token);
        }
        auto b = next_line(in, "b");
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
            if (!(b >> token)) {
                throw InputError("checkpoint: bias list too short");
            }
            layer.bias.data()[i] = parse_hex(token);
        }
        layers.push_back(std::move(layer));
    }
    const auto output = activation == "sigmoid" ? nn::OutputActivation::Sigmoid : nn::OutputActivation::Identity;
    return {role, nn::MlpNetwork(std::move(layers), output)};
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write checkpoint " + path.string());
    }
    const auto& model = checkpoint.model;
    out << kMagic << ' ' << kVersion << '\n';
    out << "fingerprint " << checkpoint.config_fingerprint << '\n';
    out << "epoch " << checkpoint.epoch << '\n';
    out << "rng " << checkpoint.rng_state << '\n';
    out << "input " << (model.input.append_sensitive ? 1 : 0) << ' ' << hex(model.input.sensitive_mean) << ' '
        << hex(model.input.sensitive_scale) << '\n';
    out << "adversary "
        << (model.adversary_input == AdversaryInput::Representation ? "representation" : "prediction") << ' '
        << (model.adversary_sees_label ? 1 : 0) << '\n';
    write_network(out, "encoder", model.encoder);
    write_network(out, "classifier", model.classifier);
    write_network(out, "adversary", model.adversary);
    if (model.decoder) {
        write_network(out, "decoder", *model.decoder);
    }
    out << "end\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputNotFoundError("cannot open checkpoint " + path.string());
    }
    Checkpoint ckpt;
    {
        auto magic = next_line(in, kMagic);
        int version = 0;
        magic >> version;
        if (version != kVersion) {
            throw InputError("unsupported checkpoint version " + std::to_string(version));
        }
    }
    next_line(in, "fingerprint") >> ckpt.config_fingerprint;
    next_line(in, "epoch") >> ckpt.epoch;
    {
        auto rng = next_line(in, "rng");
        std::getline(rng >> std::ws, ckpt.rng_state);
    }
    {
        auto input = next_line(in, "input");
        int append = 0;
        std::string mean;
        std::string scale;
        input >> append >> mean >> scale;
        ckpt.model.input = {append != 0, parse_hex(mean), parse_hex(scale)};
    }
    {
        auto adversary = next_line(in, "adversary");
        std::string mode;
        int sees_label = 0;
        adversary >> mode >> sees_label;
        ckpt.model.adversary_input =
            mode == "prediction" ? AdversaryInput::PredictionAndLabel : AdversaryInput::Representation;
        ckpt.model.adversary_sees_label = sees_label != 0;
    }
    while (true) {
        const auto pos = in.tellg();
        std::string line;
        if (!std::getline(in, line)) {
            throw InputError("checkpoint missing 'end'");
        }
        if (line == "end") {
            break;
        }
        in.seekg(pos);
        auto [role, net] = read_network(in);
        if (role == "encoder") {
            ckpt.model.encoder = std::move(net);
        } else if (role == "classifier") {
            ckpt.model.classifier = std::move(net);
        } else if (role == "adversary") {
            ckpt.model.adversary = std::move(net);
        } else if (role == "decoder") {
            ckpt.model.decoder = std::move(net);
        } else {
            throw InputError("checkpoint: unknown network role '" + role + "'");
        }
    }
    return ckpt;
}

}  // namespace laftr::training
