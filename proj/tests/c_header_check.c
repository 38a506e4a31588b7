/* The public header must compile as plain C. */
#include "geniemac/geniemac.h"

int main(void) {
  gm_optimizer_config cfg = gm_optimizer_config_default();
  gm_channel* ch = 0;
  const double h[1] = {1.0};
  if (gm_channel_create(1, h, 1.0, 1.0, &ch) != GM_OK) return 1;
  gm_channel_destroy(ch);
  return cfg.starts > 0 ? 0 : 1;
}
