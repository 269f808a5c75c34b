/* Copyright 2026 The bild Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>

namespace bild {

// Transformer decoder shape used for FLOPs/MOPs accounting.
struct ModelDescriptor {
  int layers = 0;
  int hidden_dim = 0;
  int ffn_dim = 0;
  std::int64_t decoder_params = 0;
  int bytes_per_param = 2;

  // Bytes held in the key/value cache for one token: keys and values for every
  // layer at hidden width.
  double kv_bytes_per_token() const {
    return 2.0 * layers * hidden_dim * bytes_per_param;
  }

  bool operator==(const ModelDescriptor&) const = default;
};

// Decoder shapes (without embeddings) of the reference model pairs.
inline constexpr ModelDescriptor kMt5Large{24, 1024, 2816, 409'000'000, 2};
inline constexpr ModelDescriptor kMt5Small{8, 512, 1024, 25'000'000, 2};
inline constexpr ModelDescriptor kT5Large{24, 1024, 4096, 402'000'000, 2};
inline constexpr ModelDescriptor kT5Small{6, 512, 2048, 25'000'000, 2};

}  // namespace bild
