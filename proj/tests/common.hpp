#pragma once

#include <stdexcept>
#include <string>

#include "ssg/catalog.hpp"
#include "ssg/tree.hpp"

namespace testing_support {

inline ssg::FamilySpec catalog_group(const std::string& name) {
  for (auto& [n, spec] : ssg::standard_catalog()) {
    if (n == name) return spec;
  }
  throw std::runtime_error("no catalog group " + name);
}

inline ssg::Element el(const ssg::FamilySpec& spec, const std::string& text, std::uint64_t level = 0) {
  return ssg::parse_element(spec, level, text);
}

}  // namespace testing_support
