#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lvfront/serialize.hpp"

namespace lvfront {

/// Builds the pair named by a selector string, or the scalar family for
/// "scalar". Solves the fronts and the orbit the pair needs.
SuperSubPair build_pair(const RunConfig& cfg, const std::string& selector);

enum class PlotKind { Front, Tail, Sandwich };
std::string to_string(PlotKind kind);
/// Parses "front", "tail" or "sandwich". Throws InvalidArgument.
PlotKind plot_kind_from(const std::string& s);

/// Writes a gnuplot script next to the artifacts (or into out_dir when given)
/// and returns its path. Front: front.csv. Tail: front.csv and tails.json
/// (guide lines with the predicted slopes). Sandwich: sandwich.csv and
/// optionally snapshots.csv for the space-time heat map. Throws MissingArtifact.
std::filesystem::path emit_plot_script(const std::vector<std::filesystem::path>& artifacts, PlotKind kind,
                                       const std::filesystem::path& out_dir = {});

/// Subcommands classify, spectral, front, odefree, supersub, simulate, entire,
/// check42, probe and plot. Exit code 0 on pass, 1 on a failed or certified
/// violation, 2 on usage errors.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lvfront
