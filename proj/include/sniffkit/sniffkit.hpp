// sniffkit.hpp - umbrella include

#pragma once

#include "sniffkit/alert.hpp"
#include "sniffkit/analyzer.hpp"
#include "sniffkit/bus.hpp"
#include "sniffkit/checksum.hpp"
#include "sniffkit/config.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/frame.hpp"
#include "sniffkit/generator.hpp"
#include "sniffkit/pcap.hpp"
#include "sniffkit/pipeline.hpp"
#include "sniffkit/rate_model.hpp"
#include "sniffkit/rules.hpp"
#include "sniffkit/stats.hpp"
#include "sniffkit/util.hpp"
