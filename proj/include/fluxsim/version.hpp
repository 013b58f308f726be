#ifndef FLUXSIM_VERSION_HPP
#define FLUXSIM_VERSION_HPP

namespace fluxsim {
inline constexpr const char* version = "0.1.0";
}

#endif
