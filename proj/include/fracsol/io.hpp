#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsol/field.hpp"
#include "fracsol/tiling.hpp"

namespace fracsol {

struct FieldMeta {
    BoundaryCondition bc;
    double s = 0.0;
    double q = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    nlohmann::json provenance = nlohmann::json::object();
};

struct FieldFile {
    FieldMeta meta;
    Field field;
};

nlohmann::json domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const nlohmann::json& j);
nlohmann::json bc_to_json(const BoundaryCondition& bc);
BoundaryCondition bc_from_json(const nlohmann::json& j);

/// "FLD1", u32 LE header length, JSON header, LE float64 payload (complex interleaved).
std::vector<unsigned char> encode_field(const Field& u, const FieldMeta& meta);
FieldFile decode_field(const std::vector<unsigned char>& bytes);

void write_field_file(const std::filesystem::path& path, const Field& u, const FieldMeta& meta);
FieldFile read_field_file(const std::filesystem::path& path);

/// 8-bit image bytes (PGM for real fields, PPM with hue = phase for complex fields).
std::vector<unsigned char> render_image(const Field& u);
/// PPM with structure points marked red (+) or blue (-).
std::vector<unsigned char> render_overlay(const Field& u, const std::vector<StructurePoint>& points);

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace fracsol
