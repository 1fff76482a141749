#ifndef LIEDEPTH_BUILTINS_HPP
#define LIEDEPTH_BUILTINS_HPP

#include "liedepth/io.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace liedepth {

/// Reference generator families:
///   so3                 L_x, L_y (their closure is all of so(3))
///   sl2                 E12, E21
///   diagonal            two 3x3 diagonal matrices
///   upper_triangular_2  two generic 2x2 upper-triangular matrices
///   upper_triangular_3  three generic 3x3 upper-triangular matrices
///   strictly_upper_3    E12, E23
///   strictly_upper_4    E12, E23, E34
/// ValidationError for other names.
io::NamedGenerators builtin_algebra(std::string_view name);
std::vector<std::string> builtin_algebra_names();

}  // namespace liedepth

#endif
