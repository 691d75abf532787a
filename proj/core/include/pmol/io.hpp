#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pmol/dynamics.hpp"
#include "pmol/spectra.hpp"

namespace pmol::io {

std::string g17(double v);  // shortest round-trip decimal form

/// CSV with header `t_s,re_aplus,im_aplus,re_aminus,im_aminus,re_b,im_b`
/// plus a JSON sidecar (<stem>.json) with seed, dt, frames and parameters.
void write_trajectory(const std::filesystem::path& csv_path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& csv_path);

/// CSV `freq_hz,psd` plus a JSON sidecar with the estimator settings.
void write_psd(const std::filesystem::path& csv_path, const PSD& psd);

}  // namespace pmol::io
