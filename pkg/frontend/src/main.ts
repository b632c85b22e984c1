import { mountPlayground } from "./app.js";

document.addEventListener("DOMContentLoaded", () => {
  const playground = mountPlayground(document);
  void playground.start();
});
