#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csa/mesh.hpp"

namespace csa {

/// Parses a binary or ASCII STL stream. ASCII is used iff the data begins
/// with "solid" and parses under the ASCII grammar; everything else is read
/// as binary. Vertices are deduplicated by exact coordinate equality and
/// stored normals are discarded. Triangles whose corners coincide exactly
/// cannot be represented as faces and are skipped.
///
/// Throws MeshError with kind TruncatedFile, MalformedAscii or EmptyMesh.
TriMesh parse_stl(std::string_view bytes);

TriMesh read_stl_file(const std::filesystem::path& path);

/// 80-byte header, little-endian count, 50-byte records. Polygons are fan
/// triangulated.
std::string serialize_stl_binary(const TriMesh& mesh, std::string_view header = "csa binary stl");
std::string serialize_stl_ascii(const TriMesh& mesh, std::string_view name = "csa");

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kHighlightColor{255, 0, 0};
inline constexpr Rgb kBaseColor{200, 200, 160};

/// ASCII PLY with per-face colour; faces in `highlighted` use kHighlightColor.
std::string serialize_ply_colored(const TriMesh& mesh, std::span<const FaceId> highlighted);
void export_ply_colored(const TriMesh& mesh, std::span<const FaceId> highlighted, const std::filesystem::path& path);

struct ColoredMesh {
  TriMesh mesh;
  std::vector<Rgb> face_colors;
};

/// Reads the ASCII PLY subset written by serialize_ply_colored.
ColoredMesh parse_ply_colored(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace csa
