// risk/encoding.hpp

// Copyright 2026  RISK subspace recovery authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RISK_ENCODING_HPP
#define RISK_ENCODING_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace risk {

// CRC-32 (IEEE 802.3, reflected, polynomial 0xEDB88320), the same checksum
// zlib computes.  crc32("123456789") == 0xCBF43926.
std::uint32_t crc32(const void* data, std::size_t len,
                    std::uint32_t seed = 0);

// Standard base64 with '=' padding.
std::string base64_encode(const void* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace risk

#endif  // RISK_ENCODING_HPP
