#pragma once

#include "qpo/errors.hpp"
#include "qpo/config.hpp"
#include "qpo/roots.hpp"
#include "qpo/dynamics.hpp"
#include "qpo/extremal.hpp"
#include "qpo/parallel.hpp"
#include "qpo/bounds.hpp"
#include "qpo/oracle.hpp"
#include "qpo/io.hpp"
