#pragma once

#include "coaxfilt/errors.hpp"
#include "coaxfilt/units.hpp"
#include "coaxfilt/material.hpp"
#include "coaxfilt/txline.hpp"
#include "coaxfilt/touchstone.hpp"
#include "coaxfilt/extraction.hpp"
#include "coaxfilt/synthesis.hpp"
#include "coaxfilt/design_file.hpp"
