#include "laftr/representation.hpp"

#include "laftr/errors.hpp"

#include <cmath>

namespace laftr {

InputEncoding InputEncoding::fit(const data::GroupedDataset& train, bool append_sensitive) {
    InputEncoding enc;
    enc.append_sensitive = append_sensitive;
    if (!append_sensitive || train.size() == 0) {
        return enc;
    }
    double mean = 0.0;
    for (int a : train.sensitive) {
        mean += a;
    }
    mean /= static_cast<double>(train.size());
    double var = 0.0;
    for (int a : train.sensitive) {
        var += (a - mean) * (a - mean);
    }
    var /= static_cast<double>(train.size());
    enc.sensitive_mean = mean;
    enc.sensitive_scale = var > 0.0 ? std::sqrt(var) : 1.0;
    return enc;
}

nn::Matrix InputEncoding::apply(const data::GroupedDataset& ds) const {
    if (!append_sensitive) {
        return ds.features;
    }
    nn::Matrix out(ds.features.rows(), ds.features.cols() + 1);
    out.leftCols(ds.features.cols()) = ds.features;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out(static_cast<Eigen::Index>(i), ds.features.cols()) = (ds.sensitive[i] - sensitive_mean) / sensitive_scale;
    }
    return out;
}

EncoderRepresentation::EncoderRepresentation(nn::MlpNetwork encoder, InputEncoding input, std::string name)
    : encoder_(std::move(encoder)), input_(input), name_(std::move(name)) {}

nn::Matrix EncoderRepresentation::encode(const data::GroupedDataset& ds) const {
    return encoder_.forward(input_.apply(ds));
}

}  // namespace laftr
