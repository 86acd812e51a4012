#pragma once

#include "laftr/data.hpp"
#include "laftr/nn.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace laftr {

/// Maps dataset features (X, optionally A) to the encoder's input matrix.
/// A is appended as one column standardized with train-split moments.
struct InputEncoding {
    bool append_sensitive = true;
    double sensitive_mean = 0.0;
    double sensitive_scale = 1.0;

    static InputEncoding fit(const data::GroupedDataset& train, bool append_sensitive);
    std::size_t width(std::size_t feature_width) const { return feature_width + (append_sensitive ? 1 : 0); }
    nn::Matrix apply(const data::GroupedDataset& ds) const;
};

/// A frozen function from dataset rows to representation vectors.
class Representation {
public:
    virtual ~Representation() = default;
    virtual nn::Matrix encode(const data::GroupedDataset& ds) const = 0;
    virtual std::size_t width(std::size_t feature_width) const = 0;
    /// Changes whenever the function's parameters change.
    virtual std::uint64_t fingerprint() const = 0;
    virtual std::string name() const = 0;
};

using RepresentationPtr = std::shared_ptr<const Representation>;

class EncoderRepresentation final : public Representation {
public:
    EncoderRepresentation(nn::MlpNetwork encoder, InputEncoding input, std::string name = "encoder");

    nn::Matrix encode(const data::GroupedDataset& ds) const override;
    std::size_t width(std::size_t) const override { return encoder_.output_width(); }
    std::uint64_t fingerprint() const override { return encoder_.fingerprint(); }
    std::string name() const override { return name_; }
    const nn::MlpNetwork& encoder() const { return encoder_; }

private:
    nn::MlpNetwork encoder_;
    InputEncoding input_;
    std::string name_;
};

/// The encoder input itself (identity encoder).
class RawFeatures final : public Representation {
public:
    explicit RawFeatures(InputEncoding input) : input_(input) {}

    nn::Matrix encode(const data::GroupedDataset& ds) const override { return input_.apply(ds); }
    std::size_t width(std::size_t feature_width) const override { return input_.width(feature_width); }
    std::uint64_t fingerprint() const override { return 0; }
    std::string name() const override { return "raw"; }

private:
    InputEncoding input_;
};

/// All-zero representation of fixed width.
class ConstantRepresentation final : public Representation {
public:
    explicit ConstantRepresentation(std::size_t width) : width_(width) {}

    nn::Matrix encode(const data::GroupedDataset& ds) const override {
        return nn::Matrix::Zero(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(width_));
    }
    std::size_t width(std::size_t) const override { return width_; }
    std::uint64_t fingerprint() const override { return width_; }
    std::string name() const override { return "constant"; }

private:
    std::size_t width_;
};

}  // namespace laftr
