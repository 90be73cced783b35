#pragma once

#include <acnf/config.hpp>
#include <acnf/errors.hpp>
#include <acnf/evaluation.hpp>
#include <acnf/external.hpp>
#include <acnf/oracle.hpp>
#include <acnf/persist.hpp>
#include <acnf/results.hpp>
#include <acnf/sampling.hpp>
#include <acnf/search.hpp>
#include <acnf/space.hpp>
#include <acnf/synthetic.hpp>
