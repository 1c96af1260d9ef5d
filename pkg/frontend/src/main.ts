/** Browser entry point: mount the explorer on the page, same-origin API. */

import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  createApp(root, { baseUrl: "" });
}
