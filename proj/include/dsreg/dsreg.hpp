#pragma once

#include "dsreg/error.hpp"
#include "dsreg/grid.hpp"
#include "dsreg/fft.hpp"
#include "dsreg/field.hpp"
#include "dsreg/spectral.hpp"
#include "dsreg/model.hpp"
#include "dsreg/stepper.hpp"
#include "dsreg/ground_state.hpp"
#include "dsreg/krylov.hpp"
#include "dsreg/modulation.hpp"
#include "dsreg/config.hpp"
#include "dsreg/io.hpp"
#include "dsreg/harness.hpp"
