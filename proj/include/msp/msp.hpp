#ifndef MSP_MSP_HPP
#define MSP_MSP_HPP

#include "msp/constants.hpp"
#include "msp/coupling.hpp"
#include "msp/eigenstates.hpp"
#include "msp/errors.hpp"
#include "msp/numeric.hpp"
#include "msp/plasmons.hpp"
#include "msp/scattering.hpp"
#include "msp/thermal.hpp"
#include "msp/wellbands.hpp"

namespace msp {

inline constexpr const char* version = "1.0.0";

} // namespace msp

#endif
