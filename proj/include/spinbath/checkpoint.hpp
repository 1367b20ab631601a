// Exact binary snapshots of a SpinorState.
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "spinbath/bath.hpp"
#include "spinbath/common.hpp"
#include "spinbath/grid.hpp"
#include "spinbath/state.hpp"

namespace spinbath {

namespace detail {

inline constexpr std::array<char, 8> checkpoint_magic = {'S', 'B', 'S', 'P',
                                                         'N', 'O', 'R', '1'};
inline constexpr char checkpoint_ordering[32] =
    "popcount-major,value-minor";

struct CheckpointHeader {
  std::array<char, 8> magic;
  std::uint32_t endian_tag;  // 0x01020304 as written
  std::uint32_t n_modes;
  std::uint32_t max_excitations;
  std::uint32_t n_points;
  std::uint64_t dim;
  double r_min;
  double r_max;
  char ordering[32];
};

}  // namespace detail

inline void save_checkpoint(const std::filesystem::path& path,
                            const SpinorState& psi) {
  detail::CheckpointHeader hdr{};
  hdr.magic = detail::checkpoint_magic;
  hdr.endian_tag = 0x01020304u;
  hdr.n_modes = static_cast<std::uint32_t>(psi.space.n_modes);
  hdr.max_excitations = static_cast<std::uint32_t>(psi.space.max_excitations);
  hdr.n_points = static_cast<std::uint32_t>(psi.grid.n_points);
  hdr.dim = psi.space.dim();
  hdr.r_min = psi.grid.r_min;
  hdr.r_max = psi.grid.r_max;
  std::memcpy(hdr.ordering, detail::checkpoint_ordering, sizeof(hdr.ordering));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("save_checkpoint: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(&hdr), sizeof(hdr));
  out.write(reinterpret_cast<const char*>(psi.amp.data()),
            static_cast<std::streamsize>(psi.amp.size() * sizeof(cplx)));
  if (!out) throw config_error("save_checkpoint: write failed");
}

inline SpinorState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("load_checkpoint: cannot open " + path.string());
  detail::CheckpointHeader hdr{};
  in.read(reinterpret_cast<char*>(&hdr), sizeof(hdr));
  if (!in || hdr.magic != detail::checkpoint_magic)
    throw config_error("load_checkpoint: not a state checkpoint");
  if (hdr.endian_tag != 0x01020304u)
    throw config_error("load_checkpoint: endianness mismatch");
  if (std::memcmp(hdr.ordering, detail::checkpoint_ordering,
                  sizeof(hdr.ordering)) != 0)
    throw config_error("load_checkpoint: unknown configuration ordering");
  SpinorState psi;
  psi.grid = build_grid(hdr.r_min, hdr.r_max, hdr.n_points);
  psi.space = build_configuration_space(static_cast<int>(hdr.n_modes),
                                        static_cast<int>(hdr.max_excitations));
  if (psi.space.dim() != hdr.dim)
    throw config_error("load_checkpoint: dimension mismatch");
  psi.amp.resize(hdr.dim * hdr.n_points);
  in.read(reinterpret_cast<char*>(psi.amp.data()),
          static_cast<std::streamsize>(psi.amp.size() * sizeof(cplx)));
  if (!in || in.gcount() !=
                 static_cast<std::streamsize>(psi.amp.size() * sizeof(cplx)))
    throw config_error("load_checkpoint: truncated amplitude block");
  return psi;
}

}  // namespace spinbath
