/**
 * Entry point. The service base URL is the only configuration: it comes
 * from the `?api=` query parameter and defaults to the page's own origin.
 */

import { ApiClient } from "./api.js";
import { ExplorerApp } from "./ui.js";

const baseUrl =
  new URLSearchParams(window.location.search).get("api") ?? "";

const root = document.querySelector<HTMLElement>("#app");
if (root) {
  void new ExplorerApp(root, new ApiClient(baseUrl)).init();
}
