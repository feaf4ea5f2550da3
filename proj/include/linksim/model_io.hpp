#pragma once

#include <string>

#include "linksim/ae_transceiver.hpp"
#include "linksim/nn_demapper.hpp"

namespace linksim {

// Versioned JSON model format shared by every trained system:
//   {
//     "format_version": 1,
//     "model": "demapper" | "ae",
//     "component": "enc" | "dec",          (ae only)
//     "variant": "cnn" | "dnn",            (ae only)
//     "order": M,
//     "train_ebn0_db": <dB>,
//     "layers": [ {kind, in, out, kernel?, activation, weights:[...], bias:[...]} ]
//   }
// Dense layers store `in`/`out` as widths; conv1d layers store channel counts
// plus the odd `kernel` size. Weight arrays are row-major. Numbers are
// written with round-trip precision, so load(save(m)) is value-identical.
inline constexpr int kModelFormatVersion = 1;

void save_model(const std::string& path, const DemapperModel& model);
void save_model(const std::string& path, const AeEncoder& encoder);
void save_model(const std::string& path, const AeDecoder& decoder);

DemapperModel load_demapper(const std::string& path);
AeEncoder load_ae_encoder(const std::string& path);
AeDecoder load_ae_decoder(const std::string& path);

}  // namespace linksim
