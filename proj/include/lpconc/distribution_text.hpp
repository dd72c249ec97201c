#pragma once

// Text forms of component laws:
//
//   uniform:b=1           unit            diffuniform        normal
//   twopoint:a=0.5,r=1    threepoint:a=0.5,r=1
//   zeroinflated:a=0.1,base=<law>         (base must be the last key)
//   empirical:path=FILE.csv,col=K         (K is a 0-based index or a header name)

#include <string>

#include "lpconc/distributions.hpp"

namespace lpconc {

/// Throws InputError on malformed text.
Distribution parse_distribution(const std::string& text);

}  // namespace lpconc
