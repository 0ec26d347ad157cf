#pragma once

#include <string>

#include "faprune/model.hpp"

namespace faprune {

// Binary model checkpoint (magic "FAPCKPT1", little-endian):
//   u32 layer_count; u32 input C,H,W
//   per layer: u8 tag (0 conv, 1 relu, 2 maxpool, 3 flatten, 4 dense)
//     conv:  u32 f_out,c_in,k,stride,padding; f32 weights[]; f32 bias[];
//            per filter: u8 state, u32 attenuation_count, u32 recovery_count
//     dense: u32 out,in; f32 weights[]; f32 bias[]
// Round-trips bit-exactly.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path); // throws FormatError

} // namespace faprune
