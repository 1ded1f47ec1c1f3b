#pragma once

#include <string>

#include "tdppt/instance.hpp"

namespace tdppt {

inline constexpr const char* kInstanceSchema = "3tdppt-instance/1";

// Parses an instance document and checks every invariant. Schema problems
// raise InstanceError with the path of the offending element.
Instance parse_instance(const std::string& text);

// Deterministic: equal instances give byte-identical text.
std::string serialize_instance(const Instance& instance);

Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

// Shared by the other document readers.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace tdppt
