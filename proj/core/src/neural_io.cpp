// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include "binary_io.hpp"
#include "cubeprog/error.hpp"
#include "cubeprog/neural.hpp"

namespace cubeprog {

void writeParams(const std::filesystem::path& path, const Params& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const NetSpec& spec = params.spec;
  detail::putMagic(os, "DNET");
  detail::putU32(os, kWeightFileVersion);
  detail::putU32(os, static_cast<std::uint32_t>(spec.inputDim));
  detail::putU32(os, static_cast<std::uint32_t>(spec.pathing));
  detail::putU32(os, static_cast<std::uint32_t>(spec.hidden.size()));
  for (int w : spec.hidden) detail::putU32(os, static_cast<std::uint32_t>(w));
  detail::putU32(os, static_cast<std::uint32_t>(spec.heads.size()));
  for (const auto& h : spec.heads) {
    detail::putU32(os, static_cast<std::uint32_t>(h.dim));
    detail::putU32(os, static_cast<std::uint32_t>(h.loss));
  }
  const std::uint64_t hash = spec.hash();
  detail::putU32(os, static_cast<std::uint32_t>(hash & 0xffffffffu));
  detail::putU32(os, static_cast<std::uint32_t>(hash >> 32));
  params.forEachLayer([&](const Layer<float>& l) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) detail::putF32(os, l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) detail::putF32(os, l.bias[r]);
  });
  if (!os) throw IoError("write failed for " + path.string());
}

Params readParams(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  detail::expectMagic(is, "DNET");
  const std::uint32_t version = detail::getU32(is);
  if (version != kWeightFileVersion)
    throw VersionMismatch("DNET version " + std::to_string(version) + ", expected " +
                          std::to_string(kWeightFileVersion));
  constexpr std::uint32_t kLimit = 1u << 20;
  auto bounded = [&](std::uint32_t v) {
    if (v == 0 || v > kLimit) throw FormatError("implausible network descriptor");
    return static_cast<int>(v);
  };
  NetSpec spec;
  spec.inputDim = bounded(detail::getU32(is));
  const std::uint32_t pathing = detail::getU32(is);
  if (pathing > 1) throw FormatError("unknown pathing");
  spec.pathing = static_cast<Pathing>(pathing);
  const std::uint32_t nHidden = detail::getU32(is);
  if (nHidden > 64) throw FormatError("implausible hidden layer count");
  for (std::uint32_t k = 0; k < nHidden; ++k) spec.hidden.push_back(bounded(detail::getU32(is)));
  const std::uint32_t nHeads = detail::getU32(is);
  if (nHeads == 0 || nHeads > 64) throw FormatError("implausible head count");
  for (std::uint32_t k = 0; k < nHeads; ++k) {
    HeadSpec h;
    h.dim = bounded(detail::getU32(is));
    const std::uint32_t loss = detail::getU32(is);
    if (loss > 1) throw FormatError("unknown loss kind");
    h.loss = static_cast<LossKind>(loss);
    spec.heads.push_back(h);
  }
  const std::uint64_t lo = detail::getU32(is), hi = detail::getU32(is);
  if ((lo | (hi << 32)) != spec.hash()) throw FormatError("spec hash mismatch");

  Params params = initParams<float>(spec, 0);
  params.forEachLayer([&](Layer<float>& l) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = detail::getF32(is);
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = detail::getF32(is);
  });
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in weight file");
  if (!params.allFinite()) throw FormatError("non-finite parameters in weight file");
  return params;
}

}  // namespace cubeprog
