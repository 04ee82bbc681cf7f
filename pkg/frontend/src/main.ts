import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { Session } from "./session.js";

const root = document.getElementById("app");
if (root) {
  const app = new App(root, new ApiClient(), new Session());
  void app.mount();
}
