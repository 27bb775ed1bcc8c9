#ifndef SWIPT_SWIPT_HPP
#define SWIPT_SWIPT_HPP

#include "swipt/numerics.hpp"
#include "swipt/distribution.hpp"
#include "swipt/rectenna.hpp"
#include "swipt/channel.hpp"
#include "swipt/solver.hpp"
#include "swipt/certificate.hpp"
#include "swipt/region.hpp"
#include "swipt/scenario.hpp"
#include "swipt/verify.hpp"

#endif  // SWIPT_SWIPT_HPP
