/* Copyright 2026 The asdkit Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Built as C to keep the public header free of C++.
 */
#include "asd/asd.h"

#include <stdio.h>
#include <string.h>

int main(void) {
  const double normals[] = {0.1, 0.2, 0.3};
  const double anomalies[] = {0.25, 0.35};
  double auc = 0.0;
  asd_model* model = NULL;
  const int dims[] = {4, 2, 4};
  uint64_t macs = 0;

  if (strlen(asd_version()) == 0) return 1;
  if (asd_auc(normals, 3, anomalies, 2, &auc) != ASD_OK) return 1;
  /* 5 of 6 pairs favour the anomaly. */
  if (auc * 6.0 != 5.0) return 1;
  if (asd_model_create(dims, 3, 1, &model) != ASD_OK) return 1;
  if (asd_model_macs(model, &macs) != ASD_OK || macs != 16) return 1;
  asd_model_free(model);
  if (asd_auc(NULL, 3, anomalies, 2, &auc) != ASD_ERR_INVALID_ARGUMENT) return 1;
  printf("c header ok\n");
  return 0;
}
