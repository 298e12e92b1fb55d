#pragma once

#include "levy_lrm/errors.hpp"
#include "levy_lrm/fft.hpp"
#include "levy_lrm/levy_core.hpp"
#include "levy_lrm/lrm.hpp"
#include "levy_lrm/merton.hpp"
#include "levy_lrm/variance_gamma.hpp"
